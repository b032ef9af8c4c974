pub mod control;
pub mod flow;
pub mod json;
pub mod lp;
pub mod rational;
pub mod reduction;
pub mod scene;
pub mod spectral;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scenes.md")]
    mod scenes {}
    #[doc = include_str!("../../../book/src/control.md")]
    mod control {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/flow.md")]
    mod flow {}
    #[doc = include_str!("../../../book/src/waves.md")]
    mod waves {}
    #[doc = include_str!("../../../book/src/quasimodes.md")]
    mod quasimodes {}
    #[doc = include_str!("../../../book/src/quantization.md")]
    mod quantization {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
