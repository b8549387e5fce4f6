//! Parse a PDB file and print a short structural summary.
//!
//! ```text
//! cargo run --example parse_pdb -- path/to/file.pdb
//! ```
//! Without an argument a synthetic helix bundle is generated and parsed back.

use protview::pdb::{parse_pdb, SecondaryStructure};
use protview::pipeline::synthetic_structure;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (id, text) = match std::env::args().nth(1) {
        Some(path) => (path.clone(), std::fs::read_to_string(&path)?),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            ("synthetic".to_string(), synthetic_structure("synthetic", 0, 0.2, &mut rng).to_pdb())
        }
    };
    let s = parse_pdb(&text, &id)?;
    println!("{}: {} atoms, {} bonds, chains {:?}", s.id, s.atoms.len(), s.bonds.len(), s.chains);
    let c = s.centroid();
    println!("centroid ({:.3}, {:.3}, {:.3})", c.x, c.y, c.z);

    let mut counts = [0usize; 3];
    for a in s.atoms.iter().filter(|a| a.is_alpha_carbon()) {
        let i = match s.ss_class(a.chain_id, a.residue_seq) {
            SecondaryStructure::Helix => 0,
            SecondaryStructure::Sheet => 1,
            SecondaryStructure::Coil => 2,
        };
        counts[i] += 1;
    }
    println!("residues: {} helix, {} sheet, {} coil", counts[0], counts[1], counts[2]);
    for span in &s.ss_spans {
        println!("  {:?} {} {}..={}", span.kind, span.chain_id, span.start_residue_seq, span.end_residue_seq);
    }
    Ok(())
}
