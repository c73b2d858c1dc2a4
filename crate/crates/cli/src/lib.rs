//! File formats, exports, SVG figures and the pipeline behind the `frfx`
//! command-line tool.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod model_io;
pub mod parallel;
pub mod pipeline;
pub mod svg;
pub mod ucr;

pub use error::{IoError, Result};
pub use model_io::{load_model, save_model, ModelFile, SmoothingConfig};
pub use pipeline::{run, RunConfig};
pub use svg::{render_svg, PlotSpec};
pub use ucr::{load_ucr, LabelMap, UcrData};
