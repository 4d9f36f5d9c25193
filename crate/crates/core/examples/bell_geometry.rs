// Where the Bell states, the separable octahedron and the four entangled
// cells sit in t-space.

use bell_entanglement::bd::{octahedron_margin, BELL_VERTICES};
use bell_entanglement::cli::{geometry_rows, GeometryMode, Plane};
use bell_entanglement::{classify_region, BDState, RegionLabel, Result};

fn run_example() -> Result<()> {
    for i in 1..=4 {
        let s = BDState::bell(i)?;
        assert_eq!(s.t(), BELL_VERTICES[i - 1]);
        println!(
            "Bell state {i}: t = {:?}, region {}",
            s.t(),
            classify_region(&s)
        );
    }

    // Octahedron vertices are the edge midpoints of the tetrahedron.
    let s = BDState::from_t([-1.0, 0.0, 0.0])?;
    println!(
        "t = (-1, 0, 0): p = {:?}, margin {}",
        s.p(),
        octahedron_margin(s.t())
    );

    let rows = geometry_rows(
        41,
        GeometryMode::Grid {
            plane: Some(Plane {
                axis: 2,
                value: -0.6,
            }),
        },
    )?;
    let separable = rows
        .iter()
        .filter(|r| r.region == RegionLabel::Separable)
        .count();
    println!(
        "plane t3 = -0.6: {} grid points inside the tetrahedron, {separable} separable",
        rows.len()
    );
    let mut per_cell = [0usize; 4];
    for r in &rows {
        if let RegionLabel::EntangledCell(c) = r.region {
            per_cell[c as usize - 1] += 1;
        }
    }
    println!("entangled points per cell: {per_cell:?}");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
