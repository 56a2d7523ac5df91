//! Splitting enhanced Universal Dependencies graphs into four dependency
//! trees, encoding each tree as per-token bracket labels, and collating
//! the trees back into one graph.
//!
//! ```
//! use eudsplit::conllu::read_conllu_str;
//! use eudsplit::split::{split_sentence, SplitConfig, TreeKind};
//! use eudsplit::bracket::{decode, encode};
//!
//! let text = "1\tDogs\tdog\tNOUN\t_\t_\t2\tnsubj\t2:nsubj\t_\n\
//!             2\tbark\tbark\tVERB\t_\t_\t0\troot\t0:root\t_\n\n";
//! let s = &read_conllu_str(text, Default::default()).unwrap()[0];
//! let split = split_sentence(s, &SplitConfig::default());
//! let labels = encode(split.forest(TreeKind::Basic));
//! assert_eq!(labels.bracket_row(), "_ <\\");
//! assert_eq!(&decode(&labels).forest, split.forest(TreeKind::Basic));
//! ```

pub mod bracket;
pub mod cle;
pub mod collate;
pub mod conllu;
pub mod graph;
pub mod label;
pub mod metrics;
pub mod pipeline;
pub mod predictor;
pub mod split;
pub mod synthetic;

pub use bracket::{decode, encode, BracketTag, LabelSeq};
pub use collate::{collate, CollationPolicy};
pub use conllu::{read_conllu, write_conllu, Sentence, Token};
pub use graph::{DepForest, EudEdge, EudGraph};
pub use metrics::{score, Metric, Scores};
pub use split::{split_sentence, Mode, SplitConfig, SplitResult, TreeKind};
