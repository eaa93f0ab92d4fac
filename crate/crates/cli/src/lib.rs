//! Command-line demonstrations of the `ndview` array library.
//!
//! [`run`] parses an argument list and returns the exit code together with
//! everything that would be written to stdout and stderr, so the binary is
//! a thin wrapper and tests can drive commands in-process.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use ndview::kernels::{
    compare, elementwise_binary, elementwise_binary_inplace, field_view, mask_select, scalar_binary,
    BinaryOp, CompareOp, ScalarSide,
};
use ndview::pipelines::{
    central_diff, distance_grid, evaluate_f, forward_diff, project_points, GridMethod, GridReport, Strategy,
};
use ndview::storage::{flush, from_interface, fromfile, memmap_open, tofile, ArrayInterface, MemmapMode, MutableString};
use ndview::{broadcast_view, measure, struct_dtype, ArrayView, DType, FieldSpec, ScalarType, SliceSpec, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest grid computation `grid` agrees to run.
const GRID_LIMIT_BYTES: u64 = 2 << 30;

#[derive(Parser, Debug)]
#[command(name = "ndview", version, about = "Strided array demonstrations")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shape and strides through slicing, transposing, reshaping and reinterpreting.
    StridesDemo,
    /// Broadcasting rules and zero-stride views.
    BroadcastDemo,
    /// Forward and central divided differences from shifted slices.
    FiniteDiff {
        /// Number of samples of y = x², x = 0, 2, 4, ...
        #[arg(long, default_value_t = 6)]
        samples: usize,
    },
    /// Distance grid computed with dense and broadcast coordinates.
    Grid {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
    },
    /// Projection of random points through a pinhole camera matrix.
    Camera {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Create, flush, reopen and modify a memory-mapped (300, 300) array.
    MemmapDemo {
        /// Backing file (default: myarray.memmap in the temp directory).
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Wrap foreign memory exported through the array interface.
    InterfaceDemo,
    /// Structured records: field views, masks and raw record files.
    RecordsDemo {
        /// Write the sample records to this file.
        #[arg(long, value_name = "FILE")]
        write: Option<PathBuf>,
        /// Read the records back from the file instead of using memory.
        #[arg(long)]
        read: bool,
        /// File to read from when --write is not given.
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Wall-clock and allocation comparison of evaluation strategies.
    Bench {
        /// Element count for function evaluation.
        #[arg(long, default_value_t = 100_000)]
        size: usize,
        /// Grid extent for the distance grid comparison.
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Dense,
    Broadcast,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<GridMethod> {
        match self {
            MethodArg::Dense => vec![GridMethod::Dense],
            MethodArg::Broadcast => vec![GridMethod::Broadcast],
            MethodArg::Both => vec![GridMethod::Dense, GridMethod::Broadcast],
        }
    }
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

type CmdResult = Result<String, String>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: 2, stderr: text, ..Outcome::default() }
            } else {
                Outcome { code: 0, stdout: text, ..Outcome::default() }
            };
        }
    };
    let result = match cli.command {
        Command::StridesDemo => strides_demo(),
        Command::BroadcastDemo => broadcast_demo(),
        Command::FiniteDiff { samples } => finite_diff(samples),
        Command::Grid { n, method } => grid(n, method),
        Command::Camera { n, seed } => camera(n, seed),
        Command::MemmapDemo { path } => memmap_demo(path),
        Command::InterfaceDemo => interface_demo(),
        Command::RecordsDemo { write, read, path } => records_demo(write, read, path),
        Command::Bench { size, n } => bench(size, n),
    };
    match result {
        Ok(stdout) => Outcome { code: 0, stdout, ..Outcome::default() },
        Err(msg) => Outcome {
            code: 1,
            stderr: format!("error: {msg}\n"),
            ..Outcome::default()
        },
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Python-style tuple: `(3, 3)`, `(5,)`, `()`.
fn tuple<T: std::fmt::Display>(items: &[T]) -> String {
    match items {
        [one] => format!("({one},)"),
        _ => format!("({})", items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", ")),
    }
}

fn header(out: &mut String, v: &ArrayView) {
    writeln!(out, "shape={}", tuple(v.shape())).unwrap();
    writeln!(out, "strides={}", tuple(v.strides())).unwrap();
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn strides_demo() -> CmdResult {
    let mut out = String::new();
    let x = ArrayView::from_vec((0..9i64).collect(), &[3, 3]).map_err(err)?;
    writeln!(out, "x = arange(9).reshape(3, 3)\n{x}").unwrap();
    header(&mut out, &x);

    let y = x.slice(&[SliceSpec::every(2), SliceSpec::every(2)]).map_err(err)?;
    writeln!(out, "\ny = x[::2, ::2]\n{y}").unwrap();
    header(&mut out, &y);

    y.set(&[0, 0], 100).map_err(err)?;
    writeln!(out, "\ny[0, 0] = 100\nx = {x}").unwrap();

    let xt = x.transpose();
    writeln!(out, "\nxT = x.T\n{xt}").unwrap();
    header(&mut out, &xt);

    let z = x.reshape(&[1, 9]).map_err(err)?;
    writeln!(out, "\nz = x.reshape(1, 9)\n{z}").unwrap();
    header(&mut out, &z);

    let z = z.reinterpret(DType::uint8()).map_err(err)?;
    let first = z.slice(&[SliceSpec::full(), SliceSpec::from(..8)]).map_err(err)?;
    writeln!(out, "\nz.dtype = uint8\nfirst bytes = {first}").unwrap();
    header(&mut out, &z);
    writeln!(out, "shares_buffer={}", z.shares_buffer(&x)).unwrap();
    Ok(out)
}

fn broadcast_demo() -> CmdResult {
    let mut out = String::new();
    let small = ArrayView::zeros(&[4, 1], DType::int64()).map_err(err)?;
    let expanded = broadcast_view(&small, &[2, 4, 3]).map_err(err)?;
    writeln!(out, "(4, 1) against (2, 4, 3) -> {}", tuple(expanded.shape())).unwrap();
    writeln!(out, "expanded strides={}", tuple(expanded.strides())).unwrap();
    let mismatch = ndview::broadcast_shapes(&[3], &[4]).expect_err("3 and 4 are incompatible");
    writeln!(out, "(3,) against (4,) -> {mismatch}").unwrap();

    let a = ArrayView::from_slice(&[1i64, 3, 5]);
    let b = scalar_binary(BinaryOp::Mul, &a, 3, ScalarSide::Left).map_err(err)?;
    let b_minus_a = elementwise_binary(BinaryOp::Sub, &b, &a).map_err(err)?;
    let m = ArrayView::from_vec((0..6i64).collect(), &[2, 3]).map_err(err)?;
    let b_plus_m = elementwise_binary(BinaryOp::Add, &b, &m).map_err(err)?;
    writeln!(out, "\na = {a}\nb = 3 * a = {b}\nb - a = {b_minus_a}\nm = {m}\nb + m = {b_plus_m}").unwrap();
    Ok(out)
}

fn finite_diff(samples: usize) -> CmdResult {
    let x = ArrayView::arange(0.0, 2.0 * samples as f64, 2.0, DType::int64()).map_err(err)?;
    let y = elementwise_binary(BinaryOp::Mul, &x, &x).map_err(err)?;
    let fwd = forward_diff(&x, &y).map_err(err)?;
    let cen = central_diff(&x, &y).map_err(err)?;
    Ok(format!(
        "x = {x}\ny = x**2 = {y}\n(y[1:] - y[:-1]) / (x[1:] - x[:-1]) = {fwd}\n(y[2:] - y[:-2]) / (x[2:] - x[:-2]) = {cen}\n"
    ))
}

/// Peak bytes held by each method's intermediates.
fn grid_estimate(n: u64, method: GridMethod) -> u64 {
    match method {
        // three coordinate grids, three squares, two sums, the root
        GridMethod::Dense => 9 * 8 * n.pow(3),
        GridMethod::Broadcast => 8 * (6 * n + n * n + 3 * n.pow(3)),
    }
}

fn grid(n: usize, method: MethodArg) -> CmdResult {
    if n == 0 {
        return Err("--n must be positive".into());
    }
    let methods = method.methods();
    for &m in &methods {
        let need = grid_estimate(n as u64, m);
        if need > GRID_LIMIT_BYTES {
            return Err(format!(
                "{m} grid at n={n} needs about {:.1} GiB (limit 2 GiB)",
                need as f64 / f64::from(1u32 << 30)
            ));
        }
    }
    let mut out = String::new();
    let mut reports: Vec<GridReport> = Vec::new();
    for m in methods {
        let start = Instant::now();
        let (_, report) = distance_grid(n, m).map_err(err)?;
        writeln!(out, "[{m}]\n{report}\ntime: {m} {:.1} ms\n", ms(start)).unwrap();
        reports.push(report);
    }
    if let [d, b] = reports.as_slice() {
        let rel = (d.checksum - b.checksum).abs() / d.checksum.abs().max(f64::MIN_POSITIVE);
        writeln!(out, "checksums_equal={}", rel <= 1e-9).unwrap();
        writeln!(out, "ops_ratio={:.4}", b.scalar_ops as f64 / d.scalar_ops as f64).unwrap();
        writeln!(out, "bytes_ratio={:.2}", d.bytes_allocated as f64 / b.bytes_allocated as f64).unwrap();
    }
    Ok(out)
}

const CAMERA: [f64; 9] = [500.0, 0.0, 320.0, 0.0, 500.0, 240.0, 0.0, 0.0, 1.0];

fn camera(n: usize, seed: u64) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<f64> = (0..n * 3).map(|_| rng.gen_range(0.1..=1.0)).collect();
    let points = ArrayView::from_vec(pts, &[n, 3]).map_err(err)?;
    let cam = ArrayView::from_vec(CAMERA.to_vec(), &[3, 3]).map_err(err)?;
    let start = Instant::now();
    let pix = project_points(&points, &cam).map_err(err)?;
    let elapsed = ms(start);
    let values = pix.to_vec::<f64>();
    let mut out = format!("camera = {cam}\npoints={n} seed={seed}\n");
    for row in values.chunks(3).take(3) {
        writeln!(out, "pixel=({:.6}, {:.6}, {:.6})", row[0], row[1], row[2]).unwrap();
    }
    let ones = values.chunks(3).all(|r| r[2] == 1.0);
    writeln!(out, "third_column_ones={ones}").unwrap();
    writeln!(out, "checksum={:.6}", values.iter().sum::<f64>()).unwrap();
    writeln!(out, "time: project {elapsed:.2} ms").unwrap();
    Ok(out)
}

fn memmap_demo(path: Option<PathBuf>) -> CmdResult {
    let path = path.unwrap_or_else(|| std::env::temp_dir().join("myarray.memmap"));
    let shape = [300, 300];
    let dt = DType::int64();
    let mut out = format!("path={}\n", path.display());
    {
        let a = memmap_open(&path, MemmapMode::Write, &shape, dt.clone()).map_err(err)?;
        let src = ArrayView::arange(0.0, 90_000.0, 1.0, dt.clone()).map_err(err)?;
        a.fill_flat(&src).map_err(err)?;
        flush(&a).map_err(err)?;
        writeln!(out, "mode=write shape={} filled 0..89999", tuple(a.shape())).unwrap();
        writeln!(out, "a[100, :3] = {}", row_head(&a)?).unwrap();
    }
    {
        let b = memmap_open(&path, MemmapMode::ReadWrite, &shape, dt.clone()).map_err(err)?;
        let row = b.index_axis(0, 100).map_err(err)?;
        elementwise_binary_inplace(BinaryOp::Mul, &row, 2).map_err(err)?;
        flush(&b).map_err(err)?;
        writeln!(out, "mode=r+ b[100, :] *= 2").unwrap();
    }
    let c = memmap_open(&path, MemmapMode::ReadOnly, &shape, dt).map_err(err)?;
    writeln!(out, "mode=r c[100, :3] = {}", row_head(&c)?).unwrap();
    writeln!(out, "c[99, 299] = {}", c.get(&[99, 299]).map_err(err)?).unwrap();
    writeln!(out, "c[299, 299] = {}", c.get(&[299, 299]).map_err(err)?).unwrap();
    let expect = (0..90_000i64).map(|v| if v / 300 == 100 { 2 * v } else { v });
    let verified = c.to_vec::<i64>().into_iter().eq(expect);
    writeln!(out, "verified={verified}").unwrap();
    if verified {
        Ok(out)
    } else {
        Err("reopened memmap does not hold the expected values".into())
    }
}

fn row_head(a: &ArrayView) -> Result<ArrayView, String> {
    a.slice(&[SliceSpec::new(Some(100), Some(101), 1), SliceSpec::from(..3)])
        .and_then(|v| v.index_axis(0, 0))
        .map_err(err)
}

fn interface_demo() -> CmdResult {
    let m = MutableString::new("abcde");
    let desc = m.array_interface();
    let (am, counts) = measure(|| {
        // SAFETY: `m` outlives `am`.
        unsafe { from_interface(&desc) }
    });
    let am = am.map_err(err)?;
    let mut out = format!("m = MutableString({m:?})\n", m = m.to_string());
    writeln!(out, "typestr={} shape={}", desc.typestr, tuple(&desc.shape)).unwrap();
    writeln!(out, "am = {am}").unwrap();
    writeln!(out, "buffers_allocated={}", counts.buffers_allocated).unwrap();
    elementwise_binary_inplace(BinaryOp::Add, &am, 2).map_err(err)?;
    writeln!(out, "am += 2\nam = {am}\nm = {m}").unwrap();
    Ok(out)
}

fn record_dtype() -> DType {
    struct_dtype([
        ("time", FieldSpec::from(ScalarType::UInt64)),
        (
            "pos",
            FieldSpec::Nested(vec![
                ("x".into(), ScalarType::Float64.into()),
                ("y".into(), ScalarType::Float64.into()),
            ]),
        ),
    ])
    .expect("static record layout")
}

fn sample_records(dt: &DType) -> ndview::Result<ArrayView> {
    let rec = |t: u64, x: f64, y: f64| {
        Value::Record(vec![
            ("time".into(), Value::UInt(t)),
            ("pos".into(), Value::Record(vec![("x".into(), Value::Float(x)), ("y".into(), Value::Float(y))])),
        ])
    };
    ArrayView::from_values(&[rec(1, 0.0, 0.5), rec(2, 0.0, 10.3), rec(3, 5.5, 1.1)], &[3], dt.clone())
}

fn records_demo(write: Option<PathBuf>, read: bool, path: Option<PathBuf>) -> CmdResult {
    let dt = record_dtype();
    let mut out = format!("dtype={dt}\nitemsize={}\n", dt.itemsize());
    let memory = sample_records(&dt).map_err(err)?;
    if let Some(p) = &write {
        tofile(&memory, p).map_err(err)?;
        writeln!(out, "wrote {} records ({} bytes) to {}", memory.len(), memory.nbytes(), p.display()).unwrap();
    }
    let x = if read {
        let p = write.or(path).ok_or("--read needs --write <FILE> or --path <FILE>")?;
        let x = fromfile(&p, dt).map_err(err)?;
        writeln!(out, "read {} records from {}", x.len(), p.display()).unwrap();
        x
    } else {
        memory
    };
    writeln!(out, "x = {x}").unwrap();
    let times = field_view(&x, "time").map_err(err)?;
    writeln!(out, "x['time'] = {times}").unwrap();
    let mask = compare(CompareOp::Ge, &times, 2).map_err(err)?;
    writeln!(out, "times = x['time'] >= 2 = {mask}").unwrap();
    let px = mask_select(&x, &mask)
        .and_then(|sel| sel.field("pos"))
        .and_then(|pos| pos.field("x"))
        .map_err(err)?;
    writeln!(out, "x[times]['pos']['x'] = {px}").unwrap();
    Ok(out)
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, f64) {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..runs {
        let start = Instant::now();
        last = Some(f());
        best = best.min(ms(start));
    }
    (last.expect("at least one run"), best)
}

fn bench(size: usize, n: usize) -> CmdResult {
    let x = ArrayView::arange(0.0, size as f64, 1.0, DType::float64()).map_err(err)?;
    let mut out = format!("size={size}\n");
    let mut results = Vec::new();
    for s in Strategy::ALL {
        let ((y, counts), t) = best_of(3, || measure(|| evaluate_f(&x, s)));
        let y = y.map_err(err)?;
        writeln!(
            out,
            "{s} buffers_allocated={} bytes_allocated={}\ntime: {s} {t:.3} ms",
            counts.buffers_allocated, counts.bytes_allocated
        )
        .unwrap();
        results.push(y.to_vec::<f64>());
    }
    writeln!(out, "strategies_agree={}", results.windows(2).all(|w| w[0] == w[1])).unwrap();
    if n > 0 {
        writeln!(out, "\ngrid n={n}").unwrap();
        for m in [GridMethod::Dense, GridMethod::Broadcast] {
            if grid_estimate(n as u64, m) > GRID_LIMIT_BYTES {
                return Err(format!("grid n={n} exceeds the 2 GiB limit"));
            }
            let (r, t) = best_of(3, || distance_grid(n, m));
            let (_, report) = r.map_err(err)?;
            writeln!(
                out,
                "{m} scalar_ops={} bytes_allocated={}\ntime: {m} {t:.3} ms",
                report.scalar_ops, report.bytes_allocated
            )
            .unwrap();
        }
    }
    Ok(out)
}
