//! Circulant channels: inclusion by circular deconvolution, and reduction of
//! small symmetric channels to circulant form.

use channel_inclusion::channel::{validate, Channel};
use channel_inclusion::order::{circulant_conditions, degradation_kernel, symmetric_to_circulant};

fn main() -> channel_inclusion::Result<()> {
    let k1 = Channel::circulant(&[0.7, 0.2, 0.1])?;
    let k2 = Channel::circulant(&[0.5, 0.3, 0.2])?;
    let v = circulant_conditions(&k1, &k2)?;
    println!("necessary {} sufficient {}", v.necessary_holds, v.sufficient_holds);
    if let Some(x) = &v.x {
        println!("kernel x = {:?}", x.as_slice());
        let back = k1.matmul(&degradation_kernel(x)?)?;
        println!("K1·circ(x) reproduces K2 within {:.1e}", back.max_abs_diff(&k2)?);
    }
    let rev = circulant_conditions(&k2, &k1)?;
    println!("reverse direction: necessary {}", rev.necessary_holds);

    let sym = validate(&[vec![0.1, 0.5, 0.4], vec![0.5, 0.4, 0.1], vec![0.4, 0.1, 0.5]])?;
    let (circ, r, t) = symmetric_to_circulant(&sym)?;
    println!("row map {:?}, column map {:?} give {:?}", r.map(), t.map(), circ.to_rows());
    Ok(())
}
