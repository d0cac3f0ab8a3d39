//! Parse, print, evaluate and minimize propositional formulas.
//!
//!     cargo run --example simplify_formula

use lenkit::logic::{complexity, equivalent, evaluate, format, parse, parse_infer_names, quine_mccluskey, simplify};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (f, names) = parse_infer_names("(person & nose) | (~person & nose)")?;
    let s = simplify(&f)?;
    println!("{}  =>  {}", format(&f, &names), format(&s, &names));
    println!("equivalent: {}", equivalent(&f, &s, names.len())?);

    let names = ["a", "b", "c"];
    let majority = parse("a & b | a & c | b & c | a & b & c", &names)?;
    println!(
        "{} has complexity {}, minimized: {}",
        format(&majority, &names),
        complexity(&majority)?,
        format(&simplify(&majority)?, &names)
    );
    println!("majority(1,0,1) = {}", evaluate(&majority, &[true, false, true])?);

    // minterms 4,8,10,11,12,15 with don't-cares 9,14 over four variables
    let names = ["w", "x", "y", "z"];
    let f = quine_mccluskey(&[4, 8, 10, 11, 12, 15], &[9, 14], 4)?;
    println!("QMC: {}", format(&f, &names));

    match parse("a & (b |", &["a", "b"]) {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error: {e}"),
    }
    Ok(())
}
