//! Bundled reference correlations for the 40 x 6 reference grid, with the
//! period-140 markers that accompany them.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::number::Exact;

const TABLE: &str = include_str!("../../data/reference_grid.csv");

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceCell {
    pub n: usize,
    pub c: Exact,
    pub correlation: f64,
    /// Marked periodic with period 140.
    pub periodic: bool,
}

pub fn cells() -> &'static BTreeMap<(usize, Exact), ReferenceCell> {
    static CELLS: OnceLock<BTreeMap<(usize, Exact), ReferenceCell>> = OnceLock::new();
    CELLS.get_or_init(|| {
        TABLE
            .lines()
            .filter(|l| !l.starts_with('#') && !l.starts_with("N,") && !l.trim().is_empty())
            .map(|l| {
                let cols: Vec<&str> = l.split(',').collect();
                let cell = ReferenceCell {
                    n: cols[0].parse().expect("bundled table: N"),
                    c: cols[1].parse().expect("bundled table: c"),
                    correlation: cols[2].parse().expect("bundled table: C"),
                    periodic: cols[3] == "true",
                };
                ((cell.n, cell.c), cell)
            })
            .collect()
    })
}

pub fn lookup(n: usize, c: Exact) -> Option<&'static ReferenceCell> {
    cells().get(&(n, c))
}

/// `N = 4..=15, 31..=40, 55..=72`.
pub fn table_n_values() -> Vec<usize> {
    (4..=15).chain(31..=40).chain(55..=72).collect()
}

/// `c = 4, 7/3, 3/2, 1, 2/3, 1/4`.
pub fn table_c_values() -> Vec<Exact> {
    vec![
        Exact::integer(4),
        Exact::new(7, 3),
        Exact::new(3, 2),
        Exact::integer(1),
        Exact::new(2, 3),
        Exact::new(1, 4),
    ]
}
