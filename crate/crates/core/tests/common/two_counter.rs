//! Drives the bundled two-counter program one instruction at a time and
//! compares it with a direct interpreter.

use rand::Rng;
use tdlmc_core::sim::{GlobalConfiguration, Simulator, Step};
use tdlmc_core::tdl::Program;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Instr {
    Inc(usize),
    Dec(usize),
    Zero(usize),
}

impl Instr {
    /// Name of the driver's send rule that starts the instruction.
    fn start(self) -> String {
        match self {
            Instr::Inc(k) => format!("CM.ready->inc_w{k}"),
            Instr::Dec(k) => format!("CM.ready->dz_{k}"),
            Instr::Zero(k) => format!("CM.ready->zt_{k}"),
        }
    }
}

pub fn random_script(rng: &mut impl Rng, max_len: usize) -> Vec<Instr> {
    let n = rng.gen_range(0..=max_len);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=2);
            match rng.gen_range(0..3) {
                0 => Instr::Inc(k),
                1 => Instr::Dec(k),
                _ => Instr::Zero(k),
            }
        })
        .collect()
}

/// Counter values after each instruction and the answers of zero tests.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Observed {
    pub counters: Vec<[u64; 2]>,
    pub answers: Vec<bool>,
}

/// Decrementing a zero counter leaves it unchanged.
pub fn interpret(script: &[Instr]) -> Observed {
    let mut c = [0u64; 2];
    let mut out = Observed::default();
    for i in script {
        match *i {
            Instr::Inc(k) => c[k - 1] += 1,
            Instr::Dec(k) => c[k - 1] = c[k - 1].saturating_sub(1),
            Instr::Zero(k) => out.answers.push(c[k - 1] == 0),
        }
        out.counters.push(c);
    }
    out
}

fn strip(name: &str) -> String {
    name.split('|')
        .next()
        .unwrap_or("")
        .split('#')
        .next()
        .unwrap_or("")
        .to_string()
}

pub struct Machine<'p> {
    sim: Simulator<'p>,
    g: GlobalConfiguration,
    cm: usize,
}

impl<'p> Machine<'p> {
    /// Runs the boot sequence until the driver waits at `ready`.
    pub fn boot(p: &'p Program) -> Result<Self, String> {
        let sim = Simulator::new(p);
        let g = sim.initial_configuration();
        let mut m = Machine {
            sim,
            g,
            cm: usize::MAX,
        };
        m.settle()?;
        m.cm = m.find_cm().ok_or("no driver after boot")?;
        Ok(m)
    }

    fn find_cm(&self) -> Option<usize> {
        let cm = self
            .sim
            .program()
            .threads
            .iter()
            .position(|t| t.name == "CM")?;
        self.g.locals.iter().position(|l| l.thread == cm)
    }

    fn driver_waits(&self, s: &Step) -> bool {
        let involved = s.actor == self.cm || s.partner.is_some_and(|(j, _)| j == self.cm);
        involved && self.g.locals[self.cm].location == "ready"
    }

    /// Fires steps until only the driver, waiting at `ready`, could move.
    /// Every intermediate configuration must offer at most one such step.
    fn settle(&mut self) -> Result<(), String> {
        self.settle_until(|_| false)
    }

    fn settle_until(&mut self, stop: impl Fn(&Self) -> bool) -> Result<(), String> {
        for _ in 0..10_000 {
            if stop(self) {
                return Ok(());
            }
            let steps: Vec<Step> = self
                .sim
                .enabled_steps(&self.g)
                .into_iter()
                .filter(|s| !self.driver_waits(s))
                .collect();
            match steps.as_slice() {
                [] => return Ok(()),
                [s] => self.g = self.sim.apply_step(&self.g, s).map_err(|e| e.to_string())?,
                many => {
                    let names: Vec<String> = many.iter().map(|s| self.sim.step_name(s)).collect();
                    return Err(format!(
                        "nondeterministic at {}: {names:?}",
                        self.sim.show(&self.g)
                    ));
                }
            }
            if self.cm == usize::MAX {
                if let Some(i) = self.find_cm() {
                    self.cm = i;
                }
            }
        }
        Err("no quiescent configuration".into())
    }

    pub fn execute(&mut self, i: Instr) -> Result<Option<bool>, String> {
        let want = i.start();
        let starts: Vec<Step> = self
            .sim
            .enabled_steps(&self.g)
            .into_iter()
            .filter(|s| s.actor == self.cm && strip(&self.sim.step_name(s)) == want)
            .collect();
        let [s] = starts.as_slice() else {
            return Err(format!(
                "{} enabled steps for {want} at {}",
                starts.len(),
                self.sim.show(&self.g)
            ));
        };
        self.g = self.sim.apply_step(&self.g, s).map_err(|e| e.to_string())?;
        // the answer is read off the driver before it returns to ready
        let mut answer = None;
        if let Instr::Zero(k) = i {
            let (yes, no) = (format!("zyes_{k}"), format!("zno_{k}"));
            self.settle_until(|m| [&yes, &no].contains(&&m.g.locals[m.cm].location))?;
            match self.g.locals[self.cm].location.as_str() {
                l if l == yes => answer = Some(true),
                l if l == no => answer = Some(false),
                l => return Err(format!("zero test stopped at {l}")),
            }
        }
        self.settle()?;
        if self.g.locals[self.cm].location != "ready" {
            return Err(format!(
                "driver stuck at {}",
                self.g.locals[self.cm].location
            ));
        }
        Ok(answer)
    }

    /// Live cells of each counter, not counting the sentinel.
    pub fn counters(&self) -> [u64; 2] {
        let cell = self
            .sim
            .program()
            .threads
            .iter()
            .position(|t| t.name == "Cell");
        let ids = &self.g.locals[self.cm].values;
        let count = |id| {
            self.g
                .locals
                .iter()
                .filter(|l| Some(l.thread) == cell && l.location != "gone" && l.values[0] == id)
                .count() as u64
        };
        [
            count(ids[0]).saturating_sub(1),
            count(ids[1]).saturating_sub(1),
        ]
    }

    pub fn configuration(&self) -> String {
        self.sim.show(&self.g)
    }
}

pub fn simulate(p: &Program, script: &[Instr]) -> Result<Observed, String> {
    let mut m = Machine::boot(p)?;
    let mut out = Observed::default();
    for i in script {
        if let Some(a) = m.execute(*i)? {
            out.answers.push(a);
        }
        out.counters.push(m.counters());
    }
    Ok(out)
}
