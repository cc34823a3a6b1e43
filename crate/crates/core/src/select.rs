//! Deterministic selection by median-of-medians (groups of 5), so that
//! comparison counts are reproducible run to run.

use std::cmp::Ordering;

/// Returns the element of rank `k` (0-based) under `cmp`. Panics if `k` is out
/// of range. The comparator is called once per counted comparison.
pub fn select_by<T: Clone, F: FnMut(&T, &T) -> Ordering>(items: &[T], k: usize, cmp: &mut F) -> T {
    assert!(k < items.len(), "selection rank out of range");
    let mut work: Vec<T> = items.to_vec();
    let mut k = k;
    loop {
        if work.len() <= 10 {
            insertion_sort(&mut work, cmp);
            return work[k].clone();
        }
        let mut medians: Vec<T> = Vec::with_capacity(work.len() / 5 + 1);
        for chunk in work.chunks(5) {
            let mut c: Vec<T> = chunk.to_vec();
            insertion_sort(&mut c, cmp);
            medians.push(c[(c.len() - 1) / 2].clone());
        }
        let pivot = select_by(&medians, (medians.len() - 1) / 2, cmp);
        let mut less = Vec::new();
        let mut equal = Vec::new();
        let mut greater = Vec::new();
        for item in work {
            match cmp(&item, &pivot) {
                Ordering::Less => less.push(item),
                Ordering::Equal => equal.push(item),
                Ordering::Greater => greater.push(item),
            }
        }
        if k < less.len() {
            work = less;
        } else if k < less.len() + equal.len() {
            return pivot;
        } else {
            k -= less.len() + equal.len();
            work = greater;
        }
    }
}

fn insertion_sort<T: Clone, F: FnMut(&T, &T) -> Ordering>(v: &mut [T], cmp: &mut F) {
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && cmp(&v[j - 1], &v[j]) == Ordering::Greater {
            v.swap(j - 1, j);
            j -= 1;
        }
    }
}

/// Lower median under `cmp`: the element of rank (len-1)/2.
pub fn median_by<T: Clone, F: FnMut(&T, &T) -> Ordering>(items: &[T], cmp: &mut F) -> T {
    select_by(items, (items.len() - 1) / 2, cmp)
}
