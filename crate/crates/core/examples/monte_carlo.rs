//! A small FER sweep over the binary symmetric channel.

use qldpc_tbf::code;
use qldpc_tbf::collective::resolve_ensemble;
use qldpc_tbf::sim::{plot_data, sweep, sweep_csv};

fn main() -> qldpc_tbf::Result<()> {
    let b1 = code::b1();
    let ensembles = ["BF", "D1", "D4", "NMS"]
        .iter()
        .map(|n| resolve_ensemble(n))
        .collect::<qldpc_tbf::Result<Vec<_>>>()?;
    let rows = sweep(&b1, &ensembles, &[0.01, 0.02], 2048, 50, 1, Some(100))?;
    let header = vec!["B1 example sweep".to_string()];
    print!("{}", sweep_csv(&rows, &header));
    println!();
    print!("{}", plot_data(&rows, &header));
    Ok(())
}
