//! Random netlists and a plaintext evaluator shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

/// A random netlist with at most `max_gates` gates over at most `max_vars`
/// inputs. Operands are distinct earlier names; every gate is an output.
pub fn random_netlist(rng: &mut ChaCha20Rng, max_vars: usize, max_gates: usize) -> String {
    let v = rng.gen_range(2..=max_vars);
    let g = rng.gen_range(1..=max_gates);
    let mut names: Vec<String> = (0..v).map(|i| format!("x{i}")).collect();
    let mut text = format!("in {}\n", names.join(" "));
    for i in 0..g {
        let (kind, arity) = match rng.gen_range(0..4) {
            0 => ("XOR", 2),
            1 => ("NOT", 1),
            2 => ("AND", 2),
            _ => ("ANDN", rng.gen_range(2..=3usize.min(names.len()))),
        };
        let mut ops: Vec<String> = Vec::new();
        while ops.len() < arity {
            let pick = names[rng.gen_range(0..names.len())].clone();
            if !ops.contains(&pick) {
                ops.push(pick);
            }
        }
        let id = format!("g{i}");
        text.push_str(&format!("{id} {kind} {}\n", ops.join(" ")));
        names.push(id);
    }
    let outs: Vec<String> = (0..g).map(|i| format!("g{i}")).collect();
    text.push_str(&format!("out {}\n", outs.join(" ")));
    text
}

/// Evaluates netlist text directly, without the library's parser.
pub fn plain_eval(netlist: &str, inputs: &[bool]) -> Vec<bool> {
    let mut env: HashMap<&str, bool> = HashMap::new();
    let mut outs = Vec::new();
    for line in netlist.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.first() {
            None => {}
            Some(&"in") => {
                for (name, &b) in f[1..].iter().zip(inputs) {
                    env.insert(name, b);
                }
            }
            Some(&"out") => outs = f[1..].iter().map(|n| env[n]).collect(),
            Some(id) => {
                let args: Vec<bool> = f[2..].iter().map(|n| env[n]).collect();
                let v = match f[1] {
                    "XOR" => args[0] ^ args[1],
                    "NOT" => !args[0],
                    "AND" | "ANDN" => args.iter().all(|&b| b),
                    k => panic!("unexpected kind {k}"),
                };
                env.insert(id, v);
            }
        }
    }
    outs
}

pub fn bits(m: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| m >> i & 1 == 1).collect()
}
