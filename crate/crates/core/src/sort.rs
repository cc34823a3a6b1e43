//! Truncated quicksort: deterministic quicksort that finds the exact median,
//! partitions stably around it, and returns early whenever a recursive input
//! is already sorted in increasing or decreasing order.

use std::cmp::Ordering;

use crate::meter::CostMeter;
use crate::select::median_by;

/// Stable sort of `input`. Every comparison is recorded in `meter`; each
/// recursive call also records one touched element per item it scans.
pub fn truncated_quicksort(input: &[i64], meter: &mut CostMeter) -> Vec<i64> {
    rec(input.to_vec(), meter)
}

fn rec(items: Vec<i64>, meter: &mut CostMeter) -> Vec<i64> {
    meter.touch(items.len() as u64);
    if items.len() <= 1 {
        return items;
    }
    let mut nondecreasing = true;
    let mut nonincreasing = true;
    for w in items.windows(2) {
        meter.compare();
        match w[0].cmp(&w[1]) {
            Ordering::Less => nonincreasing = false,
            Ordering::Greater => nondecreasing = false,
            Ordering::Equal => {}
        }
        if !nondecreasing && !nonincreasing {
            break;
        }
    }
    if nondecreasing {
        return items;
    }
    if nonincreasing {
        let mut rev = items;
        rev.reverse();
        return rev;
    }

    let pivot = median_by(&items, &mut |a: &i64, b: &i64| {
        meter.compare();
        a.cmp(b)
    });

    let mut less = Vec::new();
    let mut equal = Vec::new();
    let mut greater = Vec::new();
    for v in items {
        meter.compare();
        match v.cmp(&pivot) {
            Ordering::Less => less.push(v),
            Ordering::Equal => equal.push(v),
            Ordering::Greater => greater.push(v),
        }
    }

    let mut out = rec(less, meter);
    out.extend(equal);
    out.extend(rec(greater, meter));
    out
}
