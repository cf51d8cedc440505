//! A three-attribute worked instance, small enough to check by hand.
//!
//! Constants (16, 12); block with c_e = 10, c_n = 2 over [0, 100];
//! attributes a1:4, a2:8, a3:4; queries q1 = {a1,a2} with weight 2 over
//! [10, 20] and q2 = {a3} with weight 1 over [30, 40]. The unpartitioned
//! block is 344 bytes.

use crate::model::{BlockStats, Instance, Query, Schema, TimeRange, Workload};

pub fn instance() -> Instance {
    instance_with_q2_time(30, 40)
}

/// The fixture with q2 moved to `[start, end]`.
pub fn instance_with_q2_time(start: i64, end: i64) -> Instance {
    let schema = Schema::new([("a1", 4), ("a2", 8), ("a3", 4)]).expect("valid schema");
    let q1 = Query::new(
        1,
        schema.set_of(["a1", "a2"]).expect("known attributes"),
        TimeRange::new(10, 20).expect("valid range"),
        2.0,
    )
    .expect("valid query");
    let q2 = Query::new(
        2,
        schema.set_of(["a3"]).expect("known attributes"),
        TimeRange::new(start, end).expect("valid range"),
        1.0,
    )
    .expect("valid query");
    let workload = Workload::new(&schema, vec![q1, q2]).expect("valid workload");
    let stats = BlockStats::new(10, 2, TimeRange::new(0, 100).expect("valid range")).expect("valid block");
    Instance::new(schema, workload, stats)
}
