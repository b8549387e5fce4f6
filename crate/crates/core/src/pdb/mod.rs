//! Fixed-column PDB ingestion and the structure model built from it.
//!
//! Only `ATOM`/`HETATM`, `HELIX`, `SHEET`, `MODEL`/`ENDMDL` records are read.
//! Coordinates come from columns 31-54, the element from columns 77-78 (or
//! the atom name when those are blank). Bonds are inferred from distances.

mod element;

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

pub use element::{element_info, known_elements, ElementInfo, UNKNOWN_ELEMENT};

use crate::Vec3;

#[derive(Debug, Error, PartialEq)]
pub enum PdbError {
    #[error("no ATOM records found")]
    NoAtoms,
    #[error("line {line}: malformed {record} record: {reason}")]
    MalformedRecord {
        line: usize,
        record: String,
        reason: String,
    },
    #[error("residue {chain}:{residue_seq} not found")]
    UnknownResidue { chain: char, residue_seq: i32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub serial: i64,
    /// Raw 4-character name field, e.g. `" CA "`.
    pub name: String,
    /// Uppercase symbol present in the element table, or [`UNKNOWN_ELEMENT`].
    pub element: String,
    pub residue_name: String,
    pub residue_seq: i32,
    pub chain_id: char,
    pub position: Vec3,
    pub is_hetero: bool,
}

impl Atom {
    pub fn trimmed_name(&self) -> &str {
        self.name.trim()
    }

    pub fn info(&self) -> &'static ElementInfo {
        element_info(&self.element)
    }

    pub fn is_alpha_carbon(&self) -> bool {
        !self.is_hetero && self.trimmed_name() == "CA" && self.element == "C"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SsKind {
    Helix,
    Sheet,
}

/// Per-residue secondary-structure class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SecondaryStructure {
    Helix,
    Sheet,
    Coil,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SecondaryStructureSpan {
    pub kind: SsKind,
    pub chain_id: char,
    pub start_residue_seq: i32,
    pub end_residue_seq: i32,
}

impl SecondaryStructureSpan {
    pub fn contains(&self, chain_id: char, residue_seq: i32) -> bool {
        self.chain_id == chain_id && (self.start_residue_seq..=self.end_residue_seq).contains(&residue_seq)
    }

    fn overlaps(&self, other: &Self) -> bool {
        self.chain_id == other.chain_id
            && self.start_residue_seq <= other.end_residue_seq
            && other.start_residue_seq <= self.end_residue_seq
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Keep `HETATM` records (waters, ligands). Off by default.
    pub include_hetatm: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProteinStructure {
    pub id: String,
    pub atoms: Vec<Atom>,
    /// Chain ids in order of first appearance.
    pub chains: Vec<char>,
    /// Atom index pairs `(i, j)` with `i < j`, sorted.
    pub bonds: Vec<(usize, usize)>,
    pub ss_spans: Vec<SecondaryStructureSpan>,
}

/// Slice of 1-based inclusive columns `from..=to`; short lines yield what is there.
fn cols(line: &str, from: usize, to: usize) -> &str {
    let start = from - 1;
    if start >= line.len() {
        return "";
    }
    line.get(start..to.min(line.len())).unwrap_or("")
}

fn infer_element(name_field: &str, is_hetero: bool) -> String {
    let bytes: Vec<char> = name_field.chars().collect();
    let first = bytes.first().copied().unwrap_or(' ');
    let letters: String = name_field.chars().filter(|c| c.is_ascii_alphabetic()).collect();
    let candidate = if first == ' ' || first.is_ascii_digit() {
        // element right-justified in columns 13-14, e.g. " CA " or "1HB "
        letters.chars().take(1).collect::<String>()
    } else if is_hetero {
        let two: String = letters.chars().take(2).collect();
        if element::lookup(&two).is_some() {
            two
        } else {
            letters.chars().take(1).collect()
        }
    } else {
        // four-character protein names such as "HD21" start with the element
        letters.chars().take(1).collect()
    };
    normalise_element(&candidate)
}

fn normalise_element(symbol: &str) -> String {
    element::lookup(symbol).map_or_else(|| UNKNOWN_ELEMENT.to_string(), |e| e.symbol.to_string())
}

fn malformed(line: usize, record: &str, reason: impl Into<String>) -> PdbError {
    PdbError::MalformedRecord {
        line,
        record: record.trim().to_string(),
        reason: reason.into(),
    }
}

fn parse_atom(line: &str, lineno: usize, is_hetero: bool) -> Result<Option<Atom>, PdbError> {
    let record = cols(line, 1, 6);
    if line.len() < 54 {
        return Err(malformed(lineno, record, format!("{} columns, coordinates need 54", line.len())));
    }
    let alt_loc = cols(line, 17, 17);
    if !(alt_loc.trim().is_empty() || alt_loc == "A") {
        return Ok(None);
    }
    let coord = |from, to, axis| -> Result<f64, PdbError> {
        let v: f64 = cols(line, from, to)
            .trim()
            .parse()
            .map_err(|_| malformed(lineno, record, format!("unparsable {axis} coordinate")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(malformed(lineno, record, format!("non-finite {axis} coordinate")))
        }
    };
    let position = Vec3::new(coord(31, 38, "x")?, coord(39, 46, "y")?, coord(47, 54, "z")?);
    let residue_seq: i32 = cols(line, 23, 26)
        .trim()
        .parse()
        .map_err(|_| malformed(lineno, record, "unparsable residue number"))?;
    let serial = cols(line, 7, 11).trim().parse().unwrap_or(0);
    let name = format!("{:<4}", cols(line, 13, 16));
    let explicit = cols(line, 77, 78).trim();
    let element = if explicit.is_empty() || element::lookup(explicit).is_none() {
        infer_element(&name, is_hetero)
    } else {
        normalise_element(explicit)
    };
    Ok(Some(Atom {
        serial,
        name,
        element,
        residue_name: cols(line, 18, 20).trim().to_string(),
        residue_seq,
        chain_id: cols(line, 22, 22).chars().next().unwrap_or(' '),
        position,
        is_hetero,
    }))
}

fn parse_span(line: &str, kind: SsKind) -> Option<SecondaryStructureSpan> {
    let (chain_col, start, end) = match kind {
        SsKind::Helix => (20, (22, 25), (34, 37)),
        SsKind::Sheet => (22, (23, 26), (34, 37)),
    };
    let chain_id = cols(line, chain_col, chain_col).chars().next()?;
    let s: i32 = cols(line, start.0, start.1).trim().parse().ok()?;
    let e: i32 = cols(line, end.0, end.1).trim().parse().ok()?;
    (s <= e).then_some(SecondaryStructureSpan {
        kind,
        chain_id,
        start_residue_seq: s,
        end_residue_seq: e,
    })
}

/// Parses PDB text with default options (HETATM excluded).
pub fn parse_pdb(text: &str, id: &str) -> Result<ProteinStructure, PdbError> {
    parse_pdb_with(text, id, ParseOptions::default())
}

pub fn parse_pdb_with(text: &str, id: &str, options: ParseOptions) -> Result<ProteinStructure, PdbError> {
    let mut atoms = Vec::new();
    let mut spans: Vec<SecondaryStructureSpan> = Vec::new();
    let mut models_seen = 0;
    let mut first_model_done = false;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let record = cols(line, 1, 6);
        match record.trim_end() {
            "MODEL" => {
                models_seen += 1;
                if models_seen > 1 {
                    first_model_done = true;
                }
            }
            "ENDMDL" => first_model_done = true,
            "ATOM" | "HETATM" if !first_model_done => {
                let hetero = record.starts_with("HETATM");
                if hetero && !options.include_hetatm {
                    continue;
                }
                if let Some(atom) = parse_atom(line, lineno, hetero)? {
                    atoms.push(atom);
                }
            }
            "HELIX" | "SHEET" => {
                let kind = if record.starts_with("HELIX") { SsKind::Helix } else { SsKind::Sheet };
                match parse_span(line, kind) {
                    Some(span) if !spans.iter().any(|s| s.overlaps(&span)) => spans.push(span),
                    Some(span) => log::debug!("{id}: dropping overlapping {kind:?} span {span:?}"),
                    None => log::warn!("{id}: line {lineno}: unreadable {kind:?} record skipped"),
                }
            }
            _ => {}
        }
    }
    ProteinStructure::from_parts(id, atoms, spans)
}

impl ProteinStructure {
    /// Assembles a structure and infers its bonds.
    pub fn from_parts(id: &str, atoms: Vec<Atom>, ss_spans: Vec<SecondaryStructureSpan>) -> Result<Self, PdbError> {
        if atoms.is_empty() {
            return Err(PdbError::NoAtoms);
        }
        let mut chains = Vec::new();
        for a in &atoms {
            if !chains.contains(&a.chain_id) {
                chains.push(a.chain_id);
            }
        }
        let bonds = infer_bonds(&atoms);
        Ok(Self {
            id: id.to_string(),
            atoms,
            chains,
            bonds,
            ss_spans,
        })
    }

    pub fn chain_index(&self, chain_id: char) -> Option<usize> {
        self.chains.iter().position(|c| *c == chain_id)
    }

    pub fn centroid(&self) -> Vec3 {
        centroid(&self.atoms).expect("structures have at least one atom")
    }

    pub fn secondary_structure_of(&self, chain_id: char, residue_seq: i32) -> Result<SecondaryStructure, PdbError> {
        if !self
            .atoms
            .iter()
            .any(|a| a.chain_id == chain_id && a.residue_seq == residue_seq)
        {
            return Err(PdbError::UnknownResidue {
                chain: chain_id,
                residue_seq,
            });
        }
        Ok(self.ss_class(chain_id, residue_seq))
    }

    /// Span lookup without the existence check.
    pub fn ss_class(&self, chain_id: char, residue_seq: i32) -> SecondaryStructure {
        match self.ss_spans.iter().find(|s| s.contains(chain_id, residue_seq)) {
            Some(s) if s.kind == SsKind::Helix => SecondaryStructure::Helix,
            Some(_) => SecondaryStructure::Sheet,
            None => SecondaryStructure::Coil,
        }
    }

    /// Alpha-carbon atom indices per chain, in file order.
    pub fn alpha_carbons(&self) -> Vec<(char, Vec<usize>)> {
        self.chains
            .iter()
            .map(|&c| {
                let idx = self
                    .atoms
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.chain_id == c && a.is_alpha_carbon())
                    .map(|(i, _)| i)
                    .collect();
                (c, idx)
            })
            .collect()
    }

    /// Copy with every atom moved by `f` and bonds re-inferred.
    pub fn map_positions(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom {
                position: f(&a.position),
                ..a.clone()
            })
            .collect();
        Self::from_parts(&self.id, atoms, self.ss_spans.clone()).expect("non-empty")
    }

    /// Canonical fixed-column text for the atoms (plus HELIX/SHEET records).
    pub fn to_pdb(&self) -> String {
        let mut out = String::new();
        let mut helix = 0;
        let mut sheet = 0;
        for s in &self.ss_spans {
            match s.kind {
                SsKind::Helix => {
                    helix += 1;
                    let _ = writeln!(
                        out,
                        "HELIX  {helix:>3} {helix:>3} UNK {}{:>5}  UNK {}{:>5}  1",
                        s.chain_id, s.start_residue_seq, s.chain_id, s.end_residue_seq
                    );
                }
                SsKind::Sheet => {
                    sheet += 1;
                    let _ = writeln!(
                        out,
                        "SHEET  {sheet:>3}  S1 1 UNK {}{:>4}  UNK {}{:>4}  0",
                        s.chain_id, s.start_residue_seq, s.chain_id, s.end_residue_seq
                    );
                }
            }
        }
        for a in &self.atoms {
            out.push_str(&atom_record(a));
            out.push('\n');
        }
        out.push_str("END\n");
        out
    }
}

/// One canonical 80-column `ATOM`/`HETATM` line.
pub fn atom_record(a: &Atom) -> String {
    format!(
        "{:<6}{:>5} {:<4} {:>3} {}{:>4}    {:>8.3}{:>8.3}{:>8.3}{:>6.2}{:>6.2}          {:>2}  ",
        if a.is_hetero { "HETATM" } else { "ATOM" },
        a.serial,
        a.name,
        a.residue_name,
        a.chain_id,
        a.residue_seq,
        a.position.x,
        a.position.y,
        a.position.z,
        1.0,
        0.0,
        a.element,
    )
}

/// Slack added to the covalent-radius sum when inferring bonds.
pub const BOND_TOLERANCE: f64 = 0.45;
/// Pairs closer than this are duplicates, not bonds.
pub const MIN_BOND_DISTANCE: f64 = 0.4;

fn bonded(a: &Atom, b: &Atom) -> bool {
    if a.chain_id != b.chain_id {
        return false;
    }
    let d = (a.position - b.position).norm();
    d > MIN_BOND_DISTANCE && d <= a.info().covalent_radius + b.info().covalent_radius + BOND_TOLERANCE
}

/// Distance-based bonds within each chain, as sorted `(i, j)` pairs with `i < j`.
pub fn infer_bonds(atoms: &[Atom]) -> Vec<(usize, usize)> {
    let max_r = atoms.iter().map(|a| a.info().covalent_radius).fold(0.0, f64::max);
    let cell = (2.0 * max_r + BOND_TOLERANCE).max(1.0);
    let key = |p: &Vec3| {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for (i, a) in atoms.iter().enumerate() {
        grid.entry(key(&a.position)).or_default().push(i);
    }
    let mut bonds = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        let (x, y, z) = key(&a.position);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(cell_atoms) = grid.get(&(x + dx, y + dy, z + dz)) else { continue };
                    for &j in cell_atoms {
                        if j > i && bonded(a, &atoms[j]) {
                            bonds.push((i, j));
                        }
                    }
                }
            }
        }
    }
    bonds.sort_unstable();
    bonds
}

/// Unweighted mean of atom positions.
pub fn centroid(atoms: &[Atom]) -> Result<Vec3, PdbError> {
    if atoms.is_empty() {
        return Err(PdbError::NoAtoms);
    }
    let sum = atoms.iter().fold(Vec3::zeros(), |acc, a| acc + a.position);
    Ok(sum / atoms.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CA_LINE: &str = "ATOM      2  CA  MET A   1      38.000  12.000  -3.500  1.00 20.00           C  ";

    fn atom_at(name: &str, element: &str, chain: char, p: [f64; 3]) -> Atom {
        Atom {
            serial: 1,
            name: format!("{name:<4}"),
            element: element.to_string(),
            residue_name: "GLY".into(),
            residue_seq: 1,
            chain_id: chain,
            position: Vec3::new(p[0], p[1], p[2]),
            is_hetero: false,
        }
    }

    #[test]
    fn single_atom_line() {
        let s = parse_pdb(CA_LINE, "t").unwrap();
        assert_eq!(s.atoms.len(), 1);
        let a = &s.atoms[0];
        assert_eq!(a.element, "C");
        assert_eq!(a.name, " CA ");
        assert_eq!(a.residue_name, "MET");
        assert_eq!(a.chain_id, 'A');
        assert_eq!(a.position, Vec3::new(38.0, 12.0, -3.5));
        assert_eq!(s.chains, vec!['A']);
    }

    #[test]
    fn element_from_name_when_columns_blank() {
        let line = "ATOM      1  OD1 ASP A   5       1.000   2.000   3.000";
        assert_eq!(parse_pdb(line, "t").unwrap().atoms[0].element, "O");
        let h = "ATOM      1 HD21 ASN A   5       1.000   2.000   3.000";
        assert_eq!(parse_pdb(h, "t").unwrap().atoms[0].element, "H");
        let fe = "HETATM    1 FE   HEM A 200       1.000   2.000   3.000";
        let s = parse_pdb_with(fe, "t", ParseOptions { include_hetatm: true }).unwrap();
        assert_eq!(s.atoms[0].element, "FE");
        let weird = "ATOM      1  QQ  UNK A   5       1.000   2.000   3.000";
        assert_eq!(parse_pdb(weird, "t").unwrap().atoms[0].element, UNKNOWN_ELEMENT);
    }

    #[test]
    fn remarks_only_is_no_atoms() {
        assert_eq!(parse_pdb("REMARK   1 nothing here\nREMARK   2\n", "t"), Err(PdbError::NoAtoms));
    }

    #[test]
    fn short_atom_line_reports_line_number() {
        let text = format!("REMARK\n{CA_LINE}\nATOM      3  C   MET A   1      38.000");
        match parse_pdb(&text, "t") {
            Err(PdbError::MalformedRecord { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn only_first_model_is_kept() {
        let mut text = String::new();
        for model in 1..=2 {
            text.push_str(&format!("MODEL     {model:>4}\n"));
            for i in 0..10 {
                let a = atom_at(" CA ", "C", 'A', [i as f64 * 3.8, model as f64, 0.0]);
                text.push_str(&atom_record(&Atom { residue_seq: i + 1, ..a }));
                text.push('\n');
            }
            text.push_str("ENDMDL\n");
        }
        let s = parse_pdb(&text, "nmr").unwrap();
        assert_eq!(s.atoms.len(), 10);
        assert!(s.atoms.iter().all(|a| a.position.y == 1.0));
    }

    #[test]
    fn hetatm_excluded_by_default() {
        let text = format!("{CA_LINE}\nHETATM    3  O   HOH A 101      10.000  10.000  10.000  1.00  0.00           O  ");
        assert_eq!(parse_pdb(&text, "t").unwrap().atoms.len(), 1);
        let s = parse_pdb_with(&text, "t", ParseOptions { include_hetatm: true }).unwrap();
        assert_eq!(s.atoms.len(), 2);
        assert!(s.atoms[1].is_hetero);
    }

    #[test]
    fn alt_loc_b_is_dropped() {
        let a = "ATOM      1  CA AMET A   1       1.000   2.000   3.000  0.50 20.00           C  ";
        let b = "ATOM      2  CA BMET A   1       1.100   2.000   3.000  0.50 20.00           C  ";
        let s = parse_pdb(&format!("{a}\n{b}"), "t").unwrap();
        assert_eq!(s.atoms.len(), 1);
        assert_eq!(s.atoms[0].position.x, 1.0);
    }

    #[test]
    fn helix_and_sheet_records() {
        let text = "\
HELIX    1   1 ALA A    5  ALA A   10  1                                   6
SHEET    1   A 2 VAL A  20  VAL A  24  0
HELIX    2   2 ALA A    8  ALA A   12  1
";
        let mut body = String::from(text);
        for r in [7, 11, 22] {
            let a = atom_at(" CA ", "C", 'A', [r as f64, 0.0, 0.0]);
            body.push_str(&atom_record(&Atom { residue_seq: r, ..a }));
            body.push('\n');
        }
        let s = parse_pdb(&body, "t").unwrap();
        // the second helix overlaps the first and is dropped
        assert_eq!(s.ss_spans.len(), 2);
        assert_eq!(s.secondary_structure_of('A', 7), Ok(SecondaryStructure::Helix));
        assert_eq!(s.secondary_structure_of('A', 11), Ok(SecondaryStructure::Coil));
        assert_eq!(s.secondary_structure_of('A', 22), Ok(SecondaryStructure::Sheet));
        assert_eq!(s.ss_class('B', 7), SecondaryStructure::Coil);
        assert!(matches!(s.secondary_structure_of('A', 99), Err(PdbError::UnknownResidue { .. })));
    }

    #[test]
    fn no_ss_records_means_coil() {
        let s = parse_pdb(CA_LINE, "t").unwrap();
        assert_eq!(s.secondary_structure_of('A', 1), Ok(SecondaryStructure::Coil));
    }

    #[test]
    fn bond_rule() {
        // threshold for C-C: 0.77 + 0.77 + 0.45 = 1.99
        let near = [atom_at(" C1 ", "C", 'A', [0.0; 3]), atom_at(" C2 ", "C", 'A', [1.54, 0.0, 0.0])];
        assert_eq!(infer_bonds(&near), vec![(0, 1)]);
        let edge = [atom_at(" C1 ", "C", 'A', [0.0; 3]), atom_at(" C2 ", "C", 'A', [1.99, 0.0, 0.0])];
        assert_eq!(infer_bonds(&edge), vec![(0, 1)]);
        let far = [atom_at(" C1 ", "C", 'A', [0.0; 3]), atom_at(" C2 ", "C", 'A', [3.0, 0.0, 0.0])];
        assert!(infer_bonds(&far).is_empty());
        let dup = [atom_at(" C1 ", "C", 'A', [1.0; 3]), atom_at(" C2 ", "C", 'A', [1.0; 3])];
        assert!(infer_bonds(&dup).is_empty());
        let cross = [atom_at(" C1 ", "C", 'A', [0.0; 3]), atom_at(" C2 ", "C", 'B', [1.54, 0.0, 0.0])];
        assert!(infer_bonds(&cross).is_empty());
    }

    #[test]
    fn centroid_examples() {
        let one = [atom_at(" C  ", "C", 'A', [1.0, 2.0, 3.0])];
        assert_eq!(centroid(&one).unwrap(), Vec3::new(1.0, 2.0, 3.0));
        let pair = [atom_at(" C  ", "C", 'A', [-1.0, 0.0, 0.0]), atom_at(" C  ", "C", 'A', [1.0, 0.0, 0.0])];
        assert_eq!(centroid(&pair).unwrap(), Vec3::zeros());
        let cube: Vec<Atom> = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
            .iter()
            .map(|p| atom_at(" C  ", "C", 'A', *p))
            .collect();
        assert_eq!(centroid(&cube).unwrap(), Vec3::new(0.25, 0.25, 0.25));
        assert_eq!(centroid(&[]), Err(PdbError::NoAtoms));
    }
}
