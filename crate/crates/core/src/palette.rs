//! Color tables shipped as `data/palette.txt`.
//!
//! The file is a plain text table, one `table.key R,G,B` entry per line.
//! Tables: `cpk` (by element symbol, `X` is the fallback), `amino` (by
//! residue name, `UNK` is the fallback), `chain` (indexed from 0, cycled),
//! `structure` (`helix`, `sheet`, `coil`) and `charge` (`negative`,
//! `neutral`, `positive`).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const BUILTIN: &str = include_str!("../data/palette.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rgb(pub [u8; 3]);

impl Rgb {
    pub const WHITE: Rgb = Rgb([255, 255, 255]);

    /// Linear blend, `t = 0` gives `self`.
    pub fn lerp(self, other: Rgb, t: f64) -> Rgb {
        let t = t.clamp(0.0, 1.0);
        let mix = |a: u8, b: u8| (f64::from(a) + (f64::from(b) - f64::from(a)) * t).round() as u8;
        Rgb([
            mix(self.0[0], other.0[0]),
            mix(self.0[1], other.0[1]),
            mix(self.0[2], other.0[2]),
        ])
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PaletteError {
    #[error("palette line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("palette is missing required entry {0}")]
    Missing(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Palette {
    pub cpk: BTreeMap<String, Rgb>,
    pub amino: BTreeMap<String, Rgb>,
    pub chain: Vec<Rgb>,
    pub helix: Rgb,
    pub sheet: Rgb,
    pub coil: Rgb,
    pub charge_negative: Rgb,
    pub charge_neutral: Rgb,
    pub charge_positive: Rgb,
}

fn parse_rgb(text: &str) -> Option<Rgb> {
    let parts: Vec<u8> = text.split(',').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
    <[u8; 3]>::try_from(parts).ok().map(Rgb)
}

impl Palette {
    pub fn parse(text: &str) -> Result<Self, PaletteError> {
        let mut tables: BTreeMap<String, BTreeMap<String, Rgb>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |reason: &str| PaletteError::Syntax {
                line: i + 1,
                reason: reason.to_string(),
            };
            let (name, value) = line.split_once(char::is_whitespace).ok_or_else(|| syntax("expected `name R,G,B`"))?;
            let (table, key) = name.split_once('.').ok_or_else(|| syntax("name must be table.key"))?;
            let rgb = parse_rgb(value.trim()).ok_or_else(|| syntax("color must be R,G,B with 0-255 components"))?;
            tables
                .entry(table.to_string())
                .or_default()
                .insert(key.to_ascii_uppercase(), rgb);
        }
        let mut take = |table: &str| tables.remove(table).unwrap_or_default();
        let cpk = take("cpk");
        let amino = take("amino");
        let chain_map = take("chain");
        let structure = take("structure");
        let charge = take("charge");
        let get = |m: &BTreeMap<String, Rgb>, table: &str, key: &str| {
            m.get(key)
                .copied()
                .ok_or_else(|| PaletteError::Missing(format!("{table}.{}", key.to_ascii_lowercase())))
        };
        get(&cpk, "cpk", "X")?;
        get(&amino, "amino", "UNK")?;
        let mut chain = Vec::new();
        while let Some(c) = chain_map.get(&chain.len().to_string()) {
            chain.push(*c);
        }
        if chain.is_empty() {
            return Err(PaletteError::Missing("chain.0".into()));
        }
        Ok(Self {
            helix: get(&structure, "structure", "HELIX")?,
            sheet: get(&structure, "structure", "SHEET")?,
            coil: get(&structure, "structure", "COIL")?,
            charge_negative: get(&charge, "charge", "NEGATIVE")?,
            charge_neutral: get(&charge, "charge", "NEUTRAL")?,
            charge_positive: get(&charge, "charge", "POSITIVE")?,
            cpk,
            amino,
            chain,
        })
    }

    /// The shipped table.
    pub fn builtin() -> &'static Palette {
        static PALETTE: OnceLock<Palette> = OnceLock::new();
        PALETTE.get_or_init(|| Palette::parse(BUILTIN).expect("shipped palette parses"))
    }

    pub fn cpk(&self, element: &str) -> Rgb {
        self.cpk
            .get(&element.to_ascii_uppercase())
            .copied()
            .unwrap_or_else(|| self.cpk["X"])
    }

    pub fn amino(&self, residue: &str) -> Rgb {
        self.amino
            .get(&residue.to_ascii_uppercase())
            .copied()
            .unwrap_or_else(|| self.amino["UNK"])
    }

    pub fn chain(&self, index: usize) -> Rgb {
        self.chain[index % self.chain.len()]
    }

    /// Red at -1, white at 0, blue at +1; input clamped to `[-1, 1]`.
    pub fn charge(&self, charge: f64) -> Rgb {
        let c = charge.clamp(-1.0, 1.0);
        if c < 0.0 {
            self.charge_neutral.lerp(self.charge_negative, -c)
        } else {
            self.charge_neutral.lerp(self.charge_positive, c)
        }
    }
}
