//! Per-session state and background solve jobs.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use logibench::json::PlanDoc;
use logibench::model::{Instance, Plan};
use logibench::planner::SolveStats;
use serde::{Deserialize, Serialize};

/// Object counts of an instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub width: u32,
    pub height: u32,
    pub nodes: usize,
    pub highways: usize,
    pub stations: usize,
    pub shelves: usize,
    pub robots: usize,
    pub products: usize,
    pub units: u64,
    pub orders: usize,
}

impl From<&Instance> for Summary {
    fn from(inst: &Instance) -> Self {
        Summary {
            width: inst.width,
            height: inst.height,
            nodes: inst.nodes.len(),
            highways: inst.highways.len(),
            stations: inst.stations.len(),
            shelves: inst.shelves.len(),
            robots: inst.robots.len(),
            products: inst.products().len(),
            units: inst.total_units(),
            orders: inst.orders.len(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Idle,
    Running,
    Done,
    Unsat,
    Unknown,
    Cancelled,
}

/// What `GET .../solve/status` reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveStatus {
    pub status: JobState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub makespan: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SolveStats>,
}

impl SolveStatus {
    pub fn idle() -> Self {
        SolveStatus::with_state(JobState::Idle, None)
    }

    pub fn with_state(status: JobState, domain: Option<String>) -> Self {
        SolveStatus { status, domain, makespan: None, horizon: None, plan: None, reason: None, stats: None }
    }
}

/// A running or finished solve.
#[derive(Clone, Debug)]
pub struct SolveJob {
    pub cancel: Arc<AtomicBool>,
    pub status: Arc<Mutex<SolveStatus>>,
}

impl SolveJob {
    pub fn new(domain: String) -> Self {
        SolveJob {
            cancel: Arc::new(AtomicBool::new(false)),
            status: Arc::new(Mutex::new(SolveStatus::with_state(JobState::Running, Some(domain)))),
        }
    }

    pub fn snapshot(&self) -> SolveStatus {
        self.status.lock().unwrap().clone()
    }

    pub fn request_cancel(&self) {
        self.cancel.store(true, Ordering::Relaxed);
    }
}

#[derive(Debug)]
pub struct Session {
    pub instance: Instance,
    pub header: Vec<String>,
    pub plan: Option<Plan>,
    /// Set once the instance or plan differs from what was uploaded.
    pub dirty: bool,
    /// Bumped whenever the instance is replaced; solve results for older
    /// revisions are not installed as the session plan.
    pub revision: u64,
    pub job: Option<SolveJob>,
}

impl Session {
    pub fn new(instance: Instance, header: Vec<String>) -> Self {
        Session { instance, header, plan: None, dirty: false, revision: 0, job: None }
    }

    pub fn replace_instance(&mut self, instance: Instance, header: Vec<String>) {
        if let Some(job) = &self.job {
            job.request_cancel();
        }
        self.instance = instance;
        self.header = header;
        self.plan = None;
        self.dirty = true;
        self.revision += 1;
    }
}
