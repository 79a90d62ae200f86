//! State definitions: subsystem layouts, pure states, the text format and
//! builders for the standard entangled blocks.

mod layout;
mod parser;
mod state;

pub use layout::{Factor, Role, SubsystemLayout};
pub use parser::{parse_state, to_text, ParamEnv};
pub use state::{build_ghz, build_maxent, entangled_block, LabeledPureState, NORM_TOL};

pub(crate) use state::unflatten;

/// Built-in state files shipped with the crate.
pub mod builtin {
    pub const EQ8: &str = include_str!("../../states/eq8.sx");
    pub const EQ5: &str = include_str!("../../states/eq5.sx");
    pub const EQ2: &str = include_str!("../../states/eq2.sx");
    pub const APPENDIX_C: &str = include_str!("../../states/appendix-c.sx");

    /// Looks up a built-in by file name, e.g. `eq8.sx`.
    pub fn by_name(name: &str) -> Option<&'static str> {
        match name.trim_start_matches("builtin:") {
            "eq8.sx" | "eq8" => Some(EQ8),
            "eq5.sx" | "eq5" => Some(EQ5),
            "eq2.sx" | "eq2" => Some(EQ2),
            "appendix-c.sx" | "appendix-c" => Some(APPENDIX_C),
            _ => None,
        }
    }
}
