//! Three-level logger driven by `FRACRD_LOG` (error | info | debug).

use std::sync::OnceLock;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Error,
    Info,
    Debug,
}

static LEVEL: OnceLock<Level> = OnceLock::new();

pub fn init_from_env() {
    let level = match std::env::var("FRACRD_LOG").as_deref() {
        Ok("error") => Level::Error,
        Ok("debug") => Level::Debug,
        _ => Level::Info,
    };
    let _ = LEVEL.set(level);
}

fn level() -> Level {
    *LEVEL.get_or_init(|| Level::Info)
}

pub fn error(msg: &str) {
    eprintln!("error: {msg}");
}

pub fn info(msg: &str) {
    if level() >= Level::Info {
        println!("{msg}");
    }
}

pub fn debug(msg: &str) {
    if level() >= Level::Debug {
        println!("debug: {msg}");
    }
}
