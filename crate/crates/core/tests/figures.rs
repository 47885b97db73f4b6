mod common;

use common::*;
use subsquares::{lift, reduce, verify_realization, Partition};

#[test]
fn first_figure_realizes_its_partition() {
    let p: Partition = FIG1_PARTITION.parse().unwrap();
    verify_realization(&fig1(), &p, None).unwrap();
    // the same square is not in normal form for a reordered partition
    let q: Partition = "1,1,2,2,3".parse().unwrap();
    assert!(verify_realization(&fig1(), &q, None).is_err());
}

#[test]
fn second_figure_is_the_reduction_of_the_first() {
    let o = fig2();
    assert!(o.validate().is_valid());
    let r = reduce(&fig1(), o.rows(), o.cols(), o.syms()).unwrap();
    assert_eq!(r, o);
}

#[test]
fn lifting_the_second_figure_reduces_back() {
    let o = fig2();
    let sq = lift(&o).unwrap();
    assert_eq!(sq.order(), 9);
    assert_eq!(reduce(&sq, o.rows(), o.cols(), o.syms()).unwrap(), o);
}
