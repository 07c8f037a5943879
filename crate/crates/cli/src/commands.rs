use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use geonav::eval::{
    generate_tasks, replay_benchmark, run_benchmark, write_benchmark, write_boxplot_csv,
    write_metrics_csv, write_table_csv, MethodResult,
};
use geonav::field::{gradients, sample_grid, write_grid_csv, Element};
use geonav::geo::{GeoPosition, LocalFrame};
use geonav::navigator::{NavigatorContext, NavigatorRegistry};
use geonav::neural::Checkpoint;
use geonav::seed::derive_seed;
use geonav::td3::{write_row, Trainer, TRAIN_LOG_HEADER};
use geonav::Error;

use crate::{BenchmarkArgs, FieldArgs, GridArgs, ReplayArgs, TrainArgs};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn field(a: FieldArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let epoch = a.epoch.unwrap_or(cfg.epoch);
    let pos = GeoPosition::with_altitude(a.lat, a.lon, a.alt_km)?;
    let field = cfg.build_field()?;
    let e = field.elements(&pos, epoch)?;
    let g = gradients(
        field.as_ref(),
        &pos,
        epoch,
        &Element::NAV,
        &LocalFrame::at(&pos),
        cfg.env.gradient_step_m,
    )?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "field={}", field.name())?;
    writeln!(out, "lat={}", pos.latitude)?;
    writeln!(out, "lon={}", pos.longitude)?;
    writeln!(out, "alt_km={}", pos.altitude_km)?;
    writeln!(out, "epoch={epoch}")?;
    writeln!(out, "D_deg={:.6}", e.d.to_degrees())?;
    writeln!(out, "I_deg={:.6}", e.i.to_degrees())?;
    writeln!(out, "BH_nT={:.4}", e.b_h)?;
    writeln!(out, "BF_nT={:.4}", e.b_f)?;
    writeln!(out, "BX_nT={:.4}", e.bx)?;
    writeln!(out, "BY_nT={:.4}", e.by)?;
    writeln!(out, "BZ_nT={:.4}", e.bz)?;
    for (el, gv) in Element::NAV.iter().zip(&g) {
        // per km; angles in degrees
        let s = if el.is_angle() { 1000f64.to_degrees() } else { 1000.0 };
        let unit = if el.is_angle() { "deg_per_km" } else { "nT_per_km" };
        writeln!(out, "grad_{}_east_{unit}={:.6e}", el.label(), gv.gx * s)?;
        writeln!(out, "grad_{}_north_{unit}={:.6e}", el.label(), gv.gy * s)?;
    }
    Ok(())
}

pub fn grid(a: GridArgs) -> Result<()> {
    let cfg = a.config.load()?;
    let field = cfg.build_field()?;
    let nodes = sample_grid(
        field.as_ref(),
        &cfg.region,
        a.resolution,
        a.resolution,
        a.epoch.unwrap_or(cfg.epoch),
    )?;
    write_file(&a.out, |w| write_grid_csv(&nodes, w))?;
    println!("wrote {} nodes to {}", nodes.len(), a.out.display());
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let mut cfg = a.config.load()?;
    if let Some(n) = a.episodes {
        cfg.td3.episodes = n;
    }
    if let Some(z) = a.zeta3 {
        cfg.env.reward.zeta3 = z;
    }
    cfg.validate()?;
    let env = cfg.build_env()?;
    let mut trainer = match &a.resume {
        Some(path) => Trainer::resume(env, &cfg.td3, cfg.tasks, &Checkpoint::load(path)?)?,
        None => Trainer::new(env, &cfg.td3, cfg.tasks, cfg.seed)?,
    };
    let out_dir = cfg.output_dir.clone();
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;

    let log_path = out_dir.join("train_log.csv");
    let append = a.resume.is_some() && log_path.exists();
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(&log_path)
        .map_err(|e| Error::io(&log_path, e))?;
    let mut log = BufWriter::new(file);
    if !append {
        writeln!(log, "{TRAIN_LOG_HEADER}").map_err(|e| Error::io(&log_path, e))?;
    }

    let every = cfg.td3.checkpoint_every;
    let remaining = cfg.td3.episodes.saturating_sub(trainer.episodes_done());
    trainer.run(remaining, |t, row| {
        if let Some(r) = row {
            write_row(&mut log, r).map_err(|e| Error::io(&log_path, e))?;
        }
        let n = t.episodes_done();
        if every > 0 && n % every == 0 {
            t.checkpoint()
                .save(&out_dir.join("checkpoints").join(format!("episode_{n:06}.ckpt")))?;
        }
        Ok(())
    })?;
    log.flush().map_err(|e| Error::io(&log_path, e))?;
    trainer.checkpoint().save(&out_dir.join("final.ckpt"))?;

    let log = trainer.log();
    println!(
        "episodes={} window_sr={} skipped={} checkpoint={}",
        trainer.episodes_done(),
        log.last_window_sr().unwrap_or(f64::NAN),
        log.skipped,
        out_dir.join("final.ckpt").display()
    );
    Ok(())
}

fn print_table(results: &[MethodResult]) -> Result<()> {
    write_table_csv(results, std::io::stdout().lock())?;
    Ok(())
}

pub fn benchmark(a: BenchmarkArgs) -> Result<()> {
    let mut cfg = a.config.load()?;
    if let Some(n) = a.tasks {
        cfg.eval_tasks = n;
    }
    cfg.validate()?;
    let ctx = NavigatorContext {
        search: cfg.search.clone(),
        checkpoints: a.checkpoints.into_iter().collect(),
    };
    let (navigators, skipped) = NavigatorRegistry::with_defaults().create_many(&a.methods, &ctx)?;
    for (name, why) in &skipped {
        eprintln!("skipped {name}: {why}");
    }
    let env = cfg.build_env()?;
    let tasks = generate_tasks(
        &cfg.region,
        cfg.eval_tasks,
        &cfg.tasks,
        derive_seed(cfg.seed, "eval"),
    )?;
    let results = run_benchmark(&navigators, &tasks, &env)?;
    let out = a.out.unwrap_or_else(|| cfg.output_dir.join("benchmark"));
    write_benchmark(&out, &results, &tasks, &cfg.region)
        .with_context(|| format!("writing benchmark to {}", out.display()))?;
    print_table(&results)
}

pub fn replay(a: ReplayArgs) -> Result<()> {
    let results = replay_benchmark(&a.dir)?;
    let out = a.out.unwrap_or_else(|| a.dir.join("replay"));
    write_file(&out.join("table.csv"), |w| write_table_csv(&results, w))?;
    write_file(&out.join("metrics.csv"), |w| write_metrics_csv(&results, w))?;
    write_file(&out.join("boxplot.csv"), |w| write_boxplot_csv(&results, w))?;
    print_table(&results)
}
