// Collision trees: counting, listing and sign patterns.

use kinetic_limit::trees_flows::{enumerate_trees, tree_count, SignSequence};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("trees for j = 2, n = 5: {}", tree_count(2, 5)?);
    for t in enumerate_trees(1, 3)? {
        println!("k = {t}");
    }
    for s in SignSequence::all(2) {
        println!("sigma {s}  sign {}", s.term_sign());
    }
    assert_eq!(enumerate_trees(3, 3)?.count() as u64, tree_count(3, 3)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
