//! Streaming, counting, and splitting center placements.

use hckm::enumeration::{chunk_ranges, unrank, Compositions};
use hckm::{count_compositions, enumerate_compositions};

fn main() {
    for c in enumerate_compositions(3, 2, 2) {
        println!("{:?}  multiset {:?}", c.counts(), c.as_multiset());
    }

    let (size, k, cap) = (10, 4, 4);
    let total = count_compositions(size, k, cap);
    println!("{size} slots, k={k}, cap={cap}: {total} compositions");
    println!("rank 100 is {:?}", unrank(size, k, cap, 100).map(|c| c.0));

    for (start, end) in chunk_ranges(total, 3) {
        let first = Compositions::range(size, k, cap, start, end)
            .next()
            .map(|c| c.0);
        println!("chunk {start}..{end} starts at {first:?}");
    }
}
