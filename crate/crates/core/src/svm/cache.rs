//! Kernel rows for the solver: either the whole Gram matrix up front, or a
//! least-recently-used cache of rows under a byte budget.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use super::kernel::KernelSpec;

pub(crate) struct KernelRows<'a> {
    x: &'a [Vec<f64>],
    spec: KernelSpec,
    diag: Vec<f64>,
    store: Store,
}

enum Store {
    Full(Vec<Rc<[f64]>>),
    Lru(Lru),
}

struct Lru {
    capacity: usize,
    clock: u64,
    rows: HashMap<usize, (Rc<[f64]>, u64)>,
    by_age: BTreeMap<u64, usize>,
}

impl<'a> KernelRows<'a> {
    pub fn new(x: &'a [Vec<f64>], spec: KernelSpec, full_gram_max: usize, cache_bytes: usize) -> Self {
        let n = x.len();
        let diag = x.iter().map(|v| spec.eval_unchecked(v, v)).collect();
        let store = if n <= full_gram_max {
            Store::Full((0..n).map(|i| compute_row(x, &spec, i)).collect())
        } else {
            let row_bytes = n * std::mem::size_of::<f64>();
            Store::Lru(Lru {
                capacity: (cache_bytes / row_bytes).max(2),
                clock: 0,
                rows: HashMap::new(),
                by_age: BTreeMap::new(),
            })
        };
        KernelRows { x, spec, diag, store }
    }

    #[inline]
    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn row(&mut self, i: usize) -> Rc<[f64]> {
        match &mut self.store {
            Store::Full(rows) => rows[i].clone(),
            Store::Lru(lru) => {
                lru.clock += 1;
                let now = lru.clock;
                if let Some((row, age)) = lru.rows.get_mut(&i) {
                    lru.by_age.remove(age);
                    *age = now;
                    lru.by_age.insert(now, i);
                    return row.clone();
                }
                if lru.rows.len() >= lru.capacity {
                    if let Some((_, oldest)) = lru.by_age.pop_first() {
                        lru.rows.remove(&oldest);
                    }
                }
                let row = compute_row(self.x, &self.spec, i);
                lru.rows.insert(i, (row.clone(), now));
                lru.by_age.insert(now, i);
                row
            }
        }
    }

    #[cfg(test)]
    fn cached_rows(&self) -> usize {
        match &self.store {
            Store::Full(rows) => rows.len(),
            Store::Lru(lru) => lru.rows.len(),
        }
    }
}

fn compute_row(x: &[Vec<f64>], spec: &KernelSpec, i: usize) -> Rc<[f64]> {
    x.iter().map(|v| spec.eval_unchecked(&x[i], v)).collect()
}
