/// Tool-wide bounds and flags. All search bounds are positive; computations
/// that would exceed one fail with [`crate::Error::BoundExceeded`] instead of
/// running away.
#[derive(Debug, Clone)]
pub struct Config {
    /// Largest vertex count accepted for whole-invariant computations.
    pub max_vertices: usize,
    /// Largest vertex count for lattice enumeration.
    pub lattice_enum_bound: usize,
    /// Controls the bounded searches for group isomorphisms carrying a
    /// distinguished element, and the lattice-isomorphism backtracking budget.
    pub iso_search_bound: usize,
    /// Number of candidate relation-coefficient vectors examined by the
    /// positive-cone membership search.
    pub positivity_search_bound: usize,
    /// Upgrade the Condition (K) warning to an error.
    pub strict_condition_k: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_vertices: 12,
            lattice_enum_bound: 20,
            iso_search_bound: 10,
            positivity_search_bound: 1000,
            strict_condition_k: false,
        }
    }
}

impl Config {
    /// Default configuration with `KWEB_MAX_VERTICES` applied when set.
    pub fn from_env() -> Self {
        let mut cfg = Config::default();
        if let Ok(s) = std::env::var("KWEB_MAX_VERTICES") {
            if let Ok(n) = s.trim().parse::<usize>() {
                if n > 0 {
                    cfg.max_vertices = n;
                }
            }
        }
        cfg
    }
}
