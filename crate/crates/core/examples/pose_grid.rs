//! The rotation grid and seeded view budgets.

use protview::multiview::{pose_grid, rotation_matrix, view_budget, RotationGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = RotationGrid::default();
    let poses = pose_grid(&grid)?;
    println!("45 degree grid: {} poses", poses.len());
    for p in poses.iter().take(6) {
        println!("  {p}");
    }
    println!("  ...\n  {}", poses.last().unwrap());

    let r = rotation_matrix(&poses[31]);
    println!("rotation for {}:\n{r:.3}", poses[31]);
    println!("det = {:.12}", r.determinant());

    for n in [30, 60, 125, 200] {
        let b = view_budget(n, 0)?;
        println!("budget {n:>3}: first {}, last {}", b[0], b[b.len() - 1]);
    }
    Ok(())
}
