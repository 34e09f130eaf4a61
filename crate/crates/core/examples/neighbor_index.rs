//! Nearest-neighbor queries under insertion and removal, via Delaunay
//! triangulation and a brute-force reference.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcm_noma::partition::{DelaunayIndex, ExhaustiveIndex, NeighborIndex};

fn main() -> tcm_noma::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut dt = DelaunayIndex::default();
    let mut brute = ExhaustiveIndex::default();
    let mut id = 0;
    while dt.len() < 200 {
        let z = Complex::new(rng.random_range(-100..=100), rng.random_range(-100..=100));
        if dt.insert(id, z).is_ok() {
            brute.insert(id, z)?;
        }
        id += 1;
    }
    for id in 0..50 {
        if dt.contains(id) {
            dt.remove(id)?;
            brute.remove(id)?;
        }
    }
    println!("{} points, {} triangles", dt.len(), dt.triangle_count());
    for _ in 0..5 {
        let probe = Complex::new(rng.random_range(-120..=120), rng.random_range(-120..=120));
        println!("probe {probe}: delaunay {} exhaustive {}", dt.search(probe)?, brute.search(probe)?);
    }
    println!("empty circumcircles: {}", dt.empty_circumcircle_holds());
    Ok(())
}
