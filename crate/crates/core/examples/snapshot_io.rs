//! Run a preset to CSV and snapshot files, then restart from the snapshot.
//!
//! cargo run --release --example snapshot_io

use wmem::cli::{execute, parse_config, read_snapshot};

fn main() -> wmem::WResult<()> {
    let dir = std::env::temp_dir().join("wmem-snapshot-example");
    std::fs::create_dir_all(&dir).map_err(|e| wmem::WError::io(&dir, e))?;
    let csv = dir.join("run.csv");
    let snap = dir.join("state_{step}.bin");

    let text = format!(
        "preset=uz-nonlinear-gaussian nx=64 nxi=64 dt=0.0625 t_end=0.5\ncsv={}\nsnapshot={}\nsnapshot_stride=4\n",
        csv.display(),
        snap.display()
    );
    let first = execute(&parse_config(&text, &[])?)?;
    println!("first leg: {} records, status {:?}", first.records.len(), first.status);

    let saved = read_snapshot(&dir.join("state_final.bin"))?;
    println!("final snapshot at t = {}, {} values", saved.time, saved.values.len());
    assert_eq!(saved, first.last);

    let restart = format!(
        "preset=uz-nonlinear-gaussian nx=64 nxi=64 dt=0.0625 t_end=0.5\ninit=snapshot init_snapshot={}\n",
        dir.join("state_final.bin").display()
    );
    let second = execute(&parse_config(&restart, &[])?)?;
    println!("second leg from the snapshot: mass {:.12}", second.records.last().unwrap().q);

    let rows = std::fs::read_to_string(&csv).map_err(|e| wmem::WError::io(&csv, e))?;
    println!("{}", rows.lines().take(3).collect::<Vec<_>>().join("\n"));
    Ok(())
}
