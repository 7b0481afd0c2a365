//! Process-wide memo for lattice point sets.
//!
//! Each key maps to a once-cell, so concurrent callers asking for the same
//! entry block on a single computation instead of racing. The memo is bounded
//! by the total number of stored points; when the bound is exceeded the whole
//! map is dropped. Outstanding `Arc`s stay valid.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::polytope::{Point, PointSet};

/// Environment variable overriding the point budget of the memo.
pub const CACHE_POINTS_ENV: &str = "KNORMAL_CACHE_POINTS";
const DEFAULT_POINT_BUDGET: usize = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum SetKind {
    Lattice,
    Interior,
    KFold,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct CacheKey {
    pub kind: SetKind,
    pub vertices: Vec<Point>,
    pub k: u64,
}

type Slot = Arc<OnceLock<Arc<PointSet>>>;

struct PointCache {
    map: Mutex<HashMap<CacheKey, Slot>>,
    held: AtomicUsize,
    budget: usize,
}

fn cache() -> &'static PointCache {
    static CACHE: OnceLock<PointCache> = OnceLock::new();
    CACHE.get_or_init(|| PointCache {
        map: Mutex::new(HashMap::new()),
        held: AtomicUsize::new(0),
        budget: std::env::var(CACHE_POINTS_ENV)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_POINT_BUDGET),
    })
}

pub(crate) fn get_or_compute(key: CacheKey, compute: impl FnOnce() -> PointSet) -> Arc<PointSet> {
    let c = cache();
    if c.budget == 0 {
        return Arc::new(compute());
    }
    let slot = {
        let mut map = c.map.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    };
    let mut inserted = 0;
    let value = slot
        .get_or_init(|| {
            let set = compute();
            inserted = set.len().max(1);
            Arc::new(set)
        })
        .clone();
    if inserted > 0 && c.held.fetch_add(inserted, Ordering::Relaxed) + inserted > c.budget {
        let mut map = c.map.lock().unwrap_or_else(|e| e.into_inner());
        map.clear();
        c.held.store(0, Ordering::Relaxed);
    }
    value
}
