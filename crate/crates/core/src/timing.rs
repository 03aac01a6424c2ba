use std::time::Instant;

/// Wall-clock seconds spent in each named pipeline phase, in the order the
/// phases were first recorded.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    phases: Vec<(String, f64)>,
}

impl PhaseTimings {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `seconds` to `phase`, creating it if needed.
    pub fn add(&mut self, phase: &str, seconds: f64) {
        match self.phases.iter_mut().find(|(p, _)| p == phase) {
            Some((_, s)) => *s += seconds,
            None => self.phases.push((phase.to_string(), seconds)),
        }
    }

    /// Runs `f` and charges its duration to `phase`.
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.add(phase, start.elapsed().as_secs_f64());
        out
    }

    pub fn get(&self, phase: &str) -> Option<f64> {
        self.phases.iter().find(|(p, _)| p == phase).map(|(_, s)| *s)
    }

    pub fn total(&self) -> f64 {
        self.phases.iter().map(|(_, s)| s).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.phases.iter().map(|(p, s)| (p.as_str(), *s))
    }

    pub fn merge(&mut self, other: &PhaseTimings) {
        for (p, s) in other.iter() {
            self.add(p, s);
        }
    }
}
