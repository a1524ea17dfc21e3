//! N-strings from (a, 0) to (0, b) and the nilpotent string representations
//! built from them.

use rep_lab::algebra::{relation_residual, AlgebraParams};
use rep_lab::dynamics::{find_strings, DEFAULT_STRING_GRID};
use rep_lab::linalg::frobenius;
use rep_lab::repbuild::build_string_rep;
use rep_lab::specgraph::{digraph_of, transmitters_receivers};

fn main() -> rep_lab::error::Result<()> {
    let p = AlgebraParams::new(2.0, vec![-0.5, 0.0], vec![1.0, -1.0])?;
    for length in 1..=4 {
        let strings = find_strings(&p, length, 5.0, DEFAULT_STRING_GRID)?;
        println!("length {length}: {} string(s)", strings.len());
        for s in &strings {
            let rep = build_string_rep(&p, s)?;
            let g = digraph_of(rep.w(), 1e-8 * frobenius(rep.w()));
            let (tx, rx) = transmitters_receivers(&g);
            println!(
                "  a = {:.12}, b = {:.12}, residual {:.1e}, det {}, transmitters {:?}, receivers {:?}",
                s.points()[0].d,
                s.points()[length - 1].dt,
                relation_residual(&p, rep.w())?.max(),
                rep.determinant(),
                tx,
                rx
            );
        }
    }
    Ok(())
}
