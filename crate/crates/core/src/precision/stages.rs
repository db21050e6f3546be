use crate::error::{invalid, Result};

/// Hardware pipeline stages consumed by a `d`-way PRECISION.
///
/// Each way reads its key array, then its counter array, then updates the
/// carried minimum: `3d` stages when laid out one way after another. Way
/// `i+1`'s key read does not depend on way `i`'s counter stage, nor its counter
/// stage on way `i`'s carry stage, so the ways can be stacked diagonally. Only
/// the carry chain stays sequential, leaving `d + 2` stages.
pub fn stage_count(d: usize, stacked: bool) -> Result<usize> {
    if d == 0 {
        return Err(invalid("d", "at least one way is required"));
    }
    Ok(if stacked { d + 2 } else { 3 * d })
}
