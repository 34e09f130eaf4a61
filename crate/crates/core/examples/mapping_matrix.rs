//! Sparse user-to-subcarrier mappings: presets and lexicographic construction.

use tcm_noma::mapping::MappingMatrix;

fn main() -> tcm_noma::Result<()> {
    let m = MappingMatrix::preset("k4-j6")?;
    println!("4 subcarriers, 6 users, 2 nonzeros per column:\n{}", m.render());
    for k in 1..=m.subcarriers() {
        println!("subcarrier {k} carries users {:?}", m.users_on_subcarrier(k)?);
    }

    let lex = MappingMatrix::build(6, 2, 15, None)?;
    println!("\nlexicographic 6x15, d_f = {}:\n{}", lex.d_f(), lex.render());

    match MappingMatrix::build(4, 2, 7, None) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
