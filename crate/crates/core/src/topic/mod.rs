//! Topic assignment from journalist-supplied keyword lists.
//!
//! Keywords weakly label a balanced training sample ([`weak_label`]), a linear
//! classifier is trained on it ([`train_topic_model`]) and then assigns one
//! topic to every post ([`classify_topics`]).

mod config;
mod encoder;
mod model;
mod weak;

pub use config::{KeywordMatcher, TopicConfig, TopicSpec};
pub use encoder::{BagOfTokens, Encoder, PrecomputedEmbeddings, SparseVector, TextEncoder};
pub use model::{
    classify_topics, train_topic_model, train_topic_model_with, TopicAssignment, TopicMethod,
    TopicModel, TrainOptions, TrainingMetadata, MIN_TOPIC_SUPPORT, MODEL_VERSION,
};
pub use weak::{weak_label, weak_label_with, BalanceEntry, LabeledItem, LabeledSet, WeakLabelOptions};
