//! The execution queue. One worker thread owns the executor; handlers send
//! it jobs and await the replies, so invocations from any number of
//! connections run one at a time against a single store.

use std::sync::mpsc;
use std::thread;

use reqexec_core::exec::Executor;
use tokio::sync::oneshot;

type Job = Box<dyn FnOnce(&mut Option<Executor>) + Send>;

#[derive(Clone)]
pub struct Engine {
    jobs: mpsc::Sender<Job>,
}

impl Engine {
    /// Starts the worker. `None` means no model is loaded yet.
    pub fn start(executor: Option<Executor>) -> Engine {
        let (tx, rx) = mpsc::channel::<Job>();
        thread::Builder::new()
            .name("reqexec-engine".into())
            .spawn(move || {
                let mut ex = executor;
                for job in rx {
                    job(&mut ex);
                }
            })
            .expect("spawn engine thread");
        Engine { jobs: tx }
    }

    /// Runs `f` on the worker and returns its result.
    pub async fn run<R, F>(&self, f: F) -> R
    where
        F: FnOnce(&mut Option<Executor>) -> R + Send + 'static,
        R: Send + 'static,
    {
        let (tx, rx) = oneshot::channel();
        let job: Job = Box::new(move |ex| {
            let _ = tx.send(f(ex));
        });
        self.jobs.send(job).expect("engine thread is alive");
        rx.await.expect("engine thread replies")
    }
}
