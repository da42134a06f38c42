//! Parallel cell execution.
//!
//! Experiment cells are independent by construction — each one's numbers
//! depend only on its task and the shared settings — so the driver hands
//! task indices to a fixed pool of scoped workers and reassembles results
//! by index. The output is identical to running the tasks one by one in
//! order, whatever the worker count or scheduling; parallelism changes
//! wall-clock time and nothing else.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use flexion_core::dse::{run_cell, CellResult, CellTask, SearchSettings};

/// Resolves a `--jobs` value: zero means one worker per available core.
pub fn resolve_jobs(flag: usize) -> usize {
    if flag > 0 {
        flag
    } else {
        thread::available_parallelism().map_or(1, |n| n.get())
    }
}

/// Runs every task with at most `jobs` workers and returns results in task
/// order.
pub fn run_cells(tasks: &[CellTask], settings: &SearchSettings, jobs: usize) -> Vec<CellResult> {
    let jobs = jobs.clamp(1, tasks.len().max(1));
    if jobs == 1 {
        return tasks.iter().map(|t| run_cell(t, settings)).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, CellResult)>();
    thread::scope(|scope| {
        for _ in 0..jobs {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= tasks.len() {
                    break;
                }
                if tx.send((i, run_cell(&tasks[i], settings))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut slots: Vec<Option<CellResult>> = tasks.iter().map(|_| None).collect();
        for (i, cell) in rx {
            slots[i] = Some(cell);
        }
        slots
            .into_iter()
            .map(|slot| slot.expect("every task index is dispatched exactly once"))
            .collect()
    })
}
