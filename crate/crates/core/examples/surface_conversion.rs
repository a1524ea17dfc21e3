//! From surface coefficients to algebra parameters, and the Hénon preset.

use rep_lab::algebra::{from_surface, henon_preset, SurfaceParams};
use rep_lab::io::to_canonical_json;

fn main() -> rep_lab::error::Result<()> {
    let surface = SurfaceParams { hbar: 0.1, alpha0: -50.0, beta_tilde: vec![0.5, 0.0], gamma_tilde: vec![-1.0, 50.0] };
    let p = from_surface(&surface)?;
    println!("surface {surface:?}");
    print!("algebra {}", to_canonical_json(&p)?);
    println!("is Hénon: {}", p.is_henon());

    let h = henon_preset(5.0, 0.3, 3.0);
    print!("\nHénon preset a=5 b=0.3 r=3: {}", to_canonical_json(&h)?);
    Ok(())
}
