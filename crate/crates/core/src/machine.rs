//! Two-counter register machines and their deterministic single-step simulation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TABLE_FORMAT_VERSION: u32 = 1;

/// Machine index of the bundled table that never halts (a two-instruction loop).
pub const BUNDLED_LOOPER_INDEX: u64 = 5;

const BUNDLED_TABLE: &str = include_str!("../data/halting_table_v1.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    /// `reg += 1`, then jump to `target`.
    Inc,
    /// If `reg == 0` jump to `target`, otherwise `reg -= 1` and fall through.
    Decjz,
    Halt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    pub op: Op,
    pub reg: u8,
    pub target: usize,
}

pub type Program = Vec<Instruction>;

/// Ordered list of programs; program `k` (1-based) is the candidate for element `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineTable {
    pub version: u32,
    pub programs: Vec<Program>,
}

impl MachineTable {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_TABLE).expect("bundled machine table is valid")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let table: MachineTable =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("machine table: {e}")))?;
        table.validate()?;
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != TABLE_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported machine table version {} (expected {TABLE_FORMAT_VERSION})",
                self.version
            )));
        }
        for (k, prog) in self.programs.iter().enumerate() {
            if prog.is_empty() {
                return Err(Error::Parse(format!("program {} is empty", k + 1)));
            }
            for (pc, ins) in prog.iter().enumerate() {
                if ins.reg > 1 {
                    return Err(Error::Parse(format!("program {} pc {pc}: register {}", k + 1, ins.reg)));
                }
                if ins.op != Op::Halt && ins.target >= prog.len() {
                    return Err(Error::Parse(format!(
                        "program {} pc {pc}: jump target {} out of range",
                        k + 1,
                        ins.target
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }
}

/// True if no halting instruction and no exit past the end is reachable from
/// the entry point along any branch, so the machine provably runs forever.
pub fn never_halts(program: &Program) -> bool {
    let mut seen = vec![false; program.len()];
    let mut stack = vec![0usize];
    while let Some(pc) = stack.pop() {
        if pc >= program.len() {
            return false;
        }
        if std::mem::replace(&mut seen[pc], true) {
            continue;
        }
        let ins = program[pc];
        match ins.op {
            Op::Halt => return false,
            Op::Inc => stack.push(ins.target),
            Op::Decjz => stack.extend([ins.target, pc + 1]),
        }
    }
    true
}

/// Runtime state of one machine.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MachineRun {
    pub pc: usize,
    pub regs: [u64; 2],
    pub halted: bool,
}

impl MachineRun {
    /// Executes one instruction. Returns `true` if the machine halted on this step.
    /// Falling off the end of the program counts as halting.
    pub fn step(&mut self, program: &Program) -> bool {
        debug_assert!(!self.halted);
        let ins = program[self.pc];
        let r = ins.reg as usize;
        match ins.op {
            Op::Inc => {
                self.regs[r] += 1;
                self.pc = ins.target;
            }
            Op::Decjz => {
                if self.regs[r] == 0 {
                    self.pc = ins.target;
                } else {
                    self.regs[r] -= 1;
                    self.pc += 1;
                }
            }
            Op::Halt => self.halted = true,
        }
        if self.pc >= program.len() {
            self.halted = true;
        }
        self.halted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(op: Op, reg: u8, target: usize) -> Instruction {
        Instruction { op, reg, target }
    }

    #[test]
    fn static_loop_detection() {
        let table = MachineTable::bundled();
        let looping: Vec<u64> =
            (1..=table.len() as u64).filter(|&k| never_halts(&table.programs[k as usize - 1])).collect();
        assert_eq!(looping, vec![BUNDLED_LOOPER_INDEX]);
        assert!(never_halts(&vec![ins(Op::Inc, 0, 0)]));
        // a countdown leaves through the fall-through branch
        assert!(!never_halts(&vec![ins(Op::Decjz, 0, 0)]));
        assert!(!never_halts(&vec![ins(Op::Inc, 1, 1), ins(Op::Halt, 0, 0)]));
    }

    #[test]
    fn bundled_table_loads() {
        let t = MachineTable::bundled();
        assert_eq!(t.version, 1);
        assert_eq!(t.len(), 40);
        let looper = &t.programs[(BUNDLED_LOOPER_INDEX - 1) as usize];
        assert_eq!(looper, &vec![ins(Op::Inc, 0, 1), ins(Op::Inc, 1, 0)]);
    }

    #[test]
    fn looper_never_halts_and_cycles() {
        let prog = vec![ins(Op::Inc, 0, 1), ins(Op::Inc, 1, 0)];
        let mut m = MachineRun::default();
        for _ in 0..10_000 {
            assert!(!m.step(&prog));
        }
        // the control state alternates between 0 and 1 forever
        assert_eq!(m.pc, 0);
    }

    #[test]
    fn count_down_program_halts() {
        // r0 = 2; while r0 > 0 { r0 -= 1; r1 += 1 }; halt
        let prog = vec![
            ins(Op::Inc, 0, 1),
            ins(Op::Inc, 0, 2),
            ins(Op::Decjz, 0, 4),
            ins(Op::Inc, 1, 2),
            ins(Op::Halt, 0, 0),
        ];
        let mut m = MachineRun::default();
        let mut steps = 0;
        while !m.step(&prog) {
            steps += 1;
        }
        assert_eq!(m.regs, [0, 2]);
        assert_eq!(steps + 1, 2 + 2 * 2 + 1 + 1);
    }

    #[test]
    fn validation_rejects_bad_tables() {
        let bad_reg = r#"{"version":1,"programs":[[{"op":"inc","reg":2,"target":0}]]}"#;
        assert!(MachineTable::from_json(bad_reg).is_err());
        let bad_target = r#"{"version":1,"programs":[[{"op":"decjz","reg":0,"target":7}]]}"#;
        assert!(MachineTable::from_json(bad_target).is_err());
        let bad_version = r#"{"version":2,"programs":[]}"#;
        assert!(MachineTable::from_json(bad_version).is_err());
        let empty_prog = r#"{"version":1,"programs":[[]]}"#;
        assert!(MachineTable::from_json(empty_prog).is_err());
        let bad_op = r#"{"version":1,"programs":[[{"op":"jmp","reg":0,"target":0}]]}"#;
        assert!(MachineTable::from_json(bad_op).is_err());
    }
}
