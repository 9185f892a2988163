//! Walk along the integers from 0 to 5. Successor numbers only exist once
//! the `Next` stream has produced them.

use stripstream::args;
use stripstream::focused::{solve_focused, FocusedConfig};
use stripstream::model::{from_iter, OperatorSchema, Payload, PredicateKind, StreamSchema};
use stripstream::Problem;

fn main() -> stripstream::Result<()> {
    let mut p = Problem::new("walk");
    let num = p.declare("Num", 1, PredicateKind::Static)?;
    let succ = p.declare("Succ", 2, PredicateKind::Static)?;
    let at = p.declare("At", 1, PredicateKind::Fluent)?;
    let zero = p.object(Payload::Int(0));
    let five = p.object(Payload::Int(5));
    p.init_atom(num, [zero]);
    p.init_atom(at, [zero]);
    p.goal_atom(at, [five]);
    p.operators.push(
        OperatorSchema::build("Step", &["X", "Y"])
            .stat(succ, args!["X", "Y"])
            .pre(at, args!["X"])
            .add(at, args!["Y"])
            .del(at, args!["X"])
            .finish()?,
    );
    p.streams.push(
        StreamSchema::build("Next", &["X"], &["Y"])
            .inp(num, args!["X"])
            .out(num, args!["Y"])
            .out(succ, args!["X", "Y"])
            .generator(|x| {
                let n = x[0].as_int().unwrap_or(0);
                from_iter([vec![Payload::Int(n + 1)]])
            })
            .finish()?,
    );

    let report = solve_focused(&p, &FocusedConfig::default())?;
    for step in report.rendered_plan(&p).unwrap_or_default() {
        println!("{step}");
    }
    println!("{:?}", report.stats);
    Ok(())
}
