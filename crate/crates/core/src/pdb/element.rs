use std::sync::OnceLock;

use crate::palette::{Palette, Rgb};

/// Per-element radii (angstroms) and CPK color.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementInfo {
    pub symbol: &'static str,
    pub vdw_radius: f64,
    pub covalent_radius: f64,
    pub cpk_color: Rgb,
}

/// Symbol used for atoms whose element is not in the table.
pub const UNKNOWN_ELEMENT: &str = "X";

// (symbol, Bondi van der Waals radius, single-bond covalent radius)
const RADII: &[(&str, f64, f64)] = &[
    ("H", 1.20, 0.32),
    ("C", 1.70, 0.77),
    ("N", 1.55, 0.75),
    ("O", 1.52, 0.73),
    ("S", 1.80, 1.02),
    ("P", 1.80, 1.06),
    ("SE", 1.90, 1.16),
    ("FE", 2.00, 1.25),
    ("ZN", 1.39, 1.20),
    ("MG", 1.73, 1.30),
    ("CA", 2.31, 1.74),
    ("NA", 2.27, 1.54),
    ("K", 2.75, 1.96),
    ("CL", 1.75, 0.99),
    ("MN", 2.00, 1.39),
    ("CU", 1.40, 1.32),
    (UNKNOWN_ELEMENT, 1.70, 0.77),
];

/// Element table; the last entry is the fallback for unknown symbols.
fn table() -> &'static [ElementInfo] {
    static TABLE: OnceLock<Vec<ElementInfo>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let palette = Palette::builtin();
        RADII
            .iter()
            .map(|&(symbol, vdw_radius, covalent_radius)| ElementInfo {
                symbol,
                vdw_radius,
                covalent_radius,
                cpk_color: palette.cpk(symbol),
            })
            .collect()
    })
}

/// Table entry for `symbol` (case-insensitive); unknown symbols get the default entry.
pub fn element_info(symbol: &str) -> &'static ElementInfo {
    lookup(symbol).unwrap_or_else(|| table().last().expect("non-empty table"))
}

pub(crate) fn lookup(symbol: &str) -> Option<&'static ElementInfo> {
    let s = symbol.trim();
    if s.eq_ignore_ascii_case(UNKNOWN_ELEMENT) {
        return None;
    }
    table().iter().find(|e| e.symbol.eq_ignore_ascii_case(s))
}

pub fn known_elements() -> impl Iterator<Item = &'static ElementInfo> {
    table().iter()
}
