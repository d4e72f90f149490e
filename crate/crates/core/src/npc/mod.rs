//! Named-person coreference: filtering generic chains down to named
//! entities, and the entity-level metrics computed over them.

pub mod filter;
pub mod metrics;
pub mod names;

pub use filter::{
    classify_mention, filter_chains, filter_with_diagnostic, is_person_headed, is_type_headed, mention_head,
    name_variants, FilterDiagnostic, NpcEntity,
};
pub use metrics::{
    chains_not_found, detect_overmerge, detect_oversplit, evaluate_document, match_entity, npc_f1, per_type_f1,
    DocumentEvaluation, EntityMatch, Finding, NpcReport,
};
pub use names::{Honorifics, NameVariants};
