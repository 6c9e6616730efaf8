//! Finite-memory strategies for two-player games on colored graphs.

pub mod arena;
pub mod automata;
pub mod conditions;
pub mod covers;
pub mod error;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lasso;
pub mod preference;
pub mod skeleton;
pub mod strategy;
pub mod synthesis;
pub mod verify;

pub use arena::{Arena, Edge, History, Player};
pub use error::{GameError, Result};
pub use lasso::{ColorLasso, Lasso};
pub use skeleton::MemorySkeleton;
pub use preference::{Kind, Relation, Score, Side, SupResult};
pub use automata::{monotony_gadget, selectivity_gadget, ClosureArena, Nfa};
pub use strategy::{
    fix_opponent, lift, mix_ne, ml_to_ufm, play_of, product_arena, product_reachable, ufm_to_ml, Certified,
    MealyStrategy, ProductArena, Strategy, SwitchingStrategy,
};
pub use covers::{check_cyclic_cover, check_prefix_cover, CoverReport};
pub use synthesis::{solve_covered, solve_general, step_focus, EquilibriumResult, GeneralResult, Opponent, Problem, SplitRecord};
pub use verify::{best_response_within, enumerate_ne, is_ne_within, DeviationClass, NeVerdict, Witness};
pub use conditions::{counterexample_harness, test_monotony, test_selectivity, ConditionBudget, ConditionReport, ConditionViolation, Family};
