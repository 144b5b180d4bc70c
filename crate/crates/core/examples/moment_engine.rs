//! Canonical walks, tree sums and the exact trace-moment oracle.
//!
//! cargo run --example moment_engine

use wigner_lab::ensemble::{EnsembleSpec, LawFamily, VarianceProfile};
use wigner_lab::walks::{
    census, dyck_bijection, exact_trace_moment, exhaustive_trace_moment, moment_prediction,
    tree_pair_walks,
};

fn main() -> wigner_lab::Result<()> {
    for row in census(6)? {
        println!(
            "k=6 t={} walks={:>3} zeroed={:>3} tree={} sub={}",
            row.t, row.walks, row.zeroed_out, row.tree_pair, row.sub_leading
        );
    }
    for w in tree_pair_walks(6)? {
        println!("{w} -> {:?}", dyck_bijection(&w)?);
    }

    let block = VarianceProfile::block(1000)?;
    for k in [2, 4, 6] {
        let p = moment_prediction(&block, k)?;
        println!("block n=1000 k={k}: prediction {:.5} (exact={})", p.value, p.exact);
    }

    let small = EnsembleSpec::new(VarianceProfile::uniform(4)?, LawFamily::TwoPoint { p: 0.2 });
    for k in [4, 6] {
        println!(
            "two-point n=4 k={k}: walks {:.12} exhaustive {:.12}",
            exact_trace_moment(&small, k)?,
            exhaustive_trace_moment(&small, k as u32)?
        );
    }
    Ok(())
}
