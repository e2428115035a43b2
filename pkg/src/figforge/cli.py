"""Command-line pipeline: refine, ablate, sample, ir, generate, render,
evaluate, agent.

Sample identity is the directory (or file stem) name; stages pair samples by
id. Each command writes a machine-readable run manifest next to its outputs.
Exit codes: 0 success, 1 partial sample failures, 2 configuration or
environment errors.
"""
from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click
import yaml

from . import __version__
from .ablate import ablate
from .agent import AgentConfig, HttpChatEndpoint, ScriptedEndpoint, run_agent
from .codegen import FAITHFUL_ABSOLUTE, RESPONSIVE_FLOW, CodegenConfig, generate
from .curate import dedup_clusters, read_labels_csv, stratified_sample, write_worklist_csv
from .errors import FigforgeError
from .fidelity import DEFAULT_RENDERER, ImageBuffer, mae, render_page, ves
from .ir import ir_from_json, ir_to_json, to_ir
from .model import AssetStore, parse_document, serialize_document
from .refine import RefineConfig, refine
from .sidecar import SidecarClient

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_CONFIG = 2

_KIND_ALIASES = {
    "geometry": "GEOMETRY", "style": "STYLE", "image": "IMAGE_CONTENT",
    "hierarchy": "HIERARCHY", "text": "TEXT",
}
_MODE_ALIASES = {"faithful": FAITHFUL_ABSOLUTE, "responsive": RESPONSIVE_FLOW}

EVALUATE_COLUMNS = ["sample_id", "VES", "MAE", "RUR", "BC", "FU", "APR",
                    "STR", "ISR", "AVU", "CCR", "status"]


# ---------------------------------------------------------------------------
# config and manifest

@dataclass
class ToolConfig:
    refine: dict = field(default_factory=dict)
    codegen: dict = field(default_factory=dict)
    agent: dict = field(default_factory=dict)
    renderer: str = DEFAULT_RENDERER
    sidecar: str = ""
    raw: dict = field(default_factory=dict)

    @classmethod
    def load(cls, path: str | None) -> "ToolConfig":
        if not path:
            return cls()
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        return cls(
            refine=data.get("refine", {}),
            codegen=data.get("codegen", {}),
            agent=data.get("agent", {}),
            renderer=data.get("renderer", DEFAULT_RENDERER),
            sidecar=data.get("sidecar", ""),
            raw=data,
        )

    def digest(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]

    def refine_config(self) -> RefineConfig:
        return RefineConfig(**self.refine)

    def codegen_config(self, mode: str | None = None) -> CodegenConfig:
        options = dict(self.codegen)
        if mode:
            options["mode"] = mode
        return CodegenConfig(**options)


@dataclass
class SampleStatus:
    sample_id: str
    stage: str
    status: str  # OK | FAILED | SKIPPED
    ms: float
    detail: str = ""


@dataclass
class RunManifest:
    command: str
    seed: int
    config_digest: str
    version: str = __version__
    samples: list[SampleStatus] = field(default_factory=list)

    def write(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        payload = {
            "command": self.command,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "version": self.version,
            "samples": [asdict(s) for s in self.samples],
        }
        (out_dir / "run_manifest.json").write_text(
            json.dumps(payload, indent=2, ensure_ascii=False), encoding="utf-8")

    @property
    def exit_code(self) -> int:
        return EXIT_PARTIAL if any(s.status == "FAILED" for s in self.samples) else EXIT_OK


def _discover_samples(in_dir: Path, filename: str = "design.json") -> list[tuple[str, Path]]:
    """(sample_id, json_path) pairs: subdirectories first, then loose files."""
    samples = []
    for entry in sorted(in_dir.iterdir()):
        if entry.is_dir() and (entry / filename).exists():
            samples.append((entry.name, entry / filename))
        elif entry.is_file() and entry.suffix == ".json" and entry.name != "run_manifest.json":
            samples.append((entry.stem, entry))
    return samples


def _run_over_samples(manifest: RunManifest, samples, worker, jobs: int) -> None:
    def timed(sample):
        sample_id = sample[0]
        started = time.perf_counter()
        try:
            worker(sample)
            status = SampleStatus(sample_id, manifest.command, "OK",
                                  (time.perf_counter() - started) * 1000)
        except Exception as exc:
            status = SampleStatus(sample_id, manifest.command, "FAILED",
                                  (time.perf_counter() - started) * 1000, detail=str(exc))
        return status

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            manifest.samples.extend(pool.map(timed, samples))
    else:
        manifest.samples.extend(timed(s) for s in samples)


# ---------------------------------------------------------------------------
# CLI

@click.group()
@click.option("--jobs", default=1, show_default=True, help="Parallel sample workers.")
@click.option("--seed", default=0, show_default=True, help="Seed for sampling stages.")
@click.option("--config", "config_path", default=None, type=click.Path(exists=True),
              help="YAML/JSON config file; secrets come from the environment.")
@click.version_option(__version__)
@click.pass_context
def main(ctx, jobs, seed, config_path):
    """Design-metadata refinement, HTML/Tailwind generation, and UI metrics."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = ToolConfig.load(config_path)
    except Exception as exc:
        click.echo(f"error: cannot load config: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    ctx.obj["jobs"] = jobs
    ctx.obj["seed"] = seed


@main.command("refine")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.option("--dry-run", is_flag=True, help="Print planned actions, write nothing.")
@click.pass_context
def cmd_refine(ctx, in_dir: Path, out_dir: Path, dry_run: bool):
    """Refine raw Figma JSON samples into self-contained refined samples."""
    config: ToolConfig = ctx.obj["config"]
    samples = _discover_samples(in_dir)
    if dry_run:
        for sample_id, path in samples:
            click.echo(f"would refine {sample_id}: {path} -> {out_dir / sample_id}")
        ctx.exit(EXIT_OK)
    manifest = RunManifest("refine", ctx.obj["seed"], config.digest())

    def worker(sample):
        sample_id, json_path = sample
        doc = parse_document(json_path.read_bytes())
        store = AssetStore.from_dir(json_path.parent) if json_path.parent != in_dir \
            else AssetStore()
        refined, new_store, report = refine(doc, store, config.refine_config())
        target = out_dir / sample_id
        target.mkdir(parents=True, exist_ok=True)
        (target / "design.json").write_bytes(serialize_document(refined))
        new_store.write_dir(target)
        (target / "refine_report.json").write_text(
            json.dumps(asdict(report), indent=2), encoding="utf-8")

    _run_over_samples(manifest, samples, worker, ctx.obj["jobs"])
    manifest.write(out_dir)
    _summarize(manifest)
    ctx.exit(manifest.exit_code)


@main.command("ablate")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.option("--kind", required=True,
              type=click.Choice(sorted(_KIND_ALIASES), case_sensitive=False))
@click.pass_context
def cmd_ablate(ctx, in_dir: Path, out_dir: Path, kind: str):
    """Apply one metadata ablation to every refined sample."""
    config: ToolConfig = ctx.obj["config"]
    manifest = RunManifest(f"ablate:{kind}", ctx.obj["seed"], config.digest())

    def worker(sample):
        sample_id, json_path = sample
        doc = parse_document(json_path.read_bytes())
        out = ablate(doc, _KIND_ALIASES[kind.lower()])
        target = out_dir / sample_id
        target.mkdir(parents=True, exist_ok=True)
        (target / "design.json").write_bytes(serialize_document(out))

    _run_over_samples(manifest, _discover_samples(in_dir), worker, ctx.obj["jobs"])
    manifest.write(out_dir)
    _summarize(manifest)
    ctx.exit(manifest.exit_code)


@main.command("sample")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--total", required=True, type=int)
@click.option("--embeddings", "embeddings_path", type=click.Path(exists=True),
              help="JSON map of id -> unit vector; enables visual dedup.")
@click.option("--sizes", "sizes_path", type=click.Path(exists=True),
              help="JSON map of id -> image byte size (dedup keep rule).")
@click.option("--threshold", default=0.95, show_default=True)
@click.argument("out_csv", type=click.Path(path_type=Path))
@click.pass_context
def cmd_sample(ctx, labels_path, total, embeddings_path, sizes_path, threshold, out_csv: Path):
    """Stratified candidate worklist from a labels CSV (quality 1 excluded)."""
    try:
        labels = read_labels_csv(labels_path)
        if embeddings_path:
            embeddings = json.loads(Path(embeddings_path).read_text(encoding="utf-8"))
            sizes = json.loads(Path(sizes_path).read_text(encoding="utf-8")) if sizes_path else {}
            survivors = dedup_clusters(embeddings, threshold, sizes)
            labels = {sid: lab for sid, lab in labels.items()
                      if sid not in embeddings or sid in survivors}
        candidates = stratified_sample(labels, total, ctx.obj["seed"])
    except FigforgeError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    write_worklist_csv(out_csv, candidates)
    click.echo(f"wrote {sum(len(v) for v in candidates.values())} candidates "
               f"across {len(candidates)} strata to {out_csv}")
    ctx.exit(EXIT_OK)


@main.command("ir")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.pass_context
def cmd_ir(ctx, in_dir: Path, out_dir: Path):
    """Convert refined samples to the versioned IR JSON."""
    config: ToolConfig = ctx.obj["config"]
    manifest = RunManifest("ir", ctx.obj["seed"], config.digest())

    def worker(sample):
        sample_id, json_path = sample
        ir = to_ir(parse_document(json_path.read_bytes()))
        target = out_dir / sample_id
        target.mkdir(parents=True, exist_ok=True)
        (target / "ir.json").write_text(ir_to_json(ir), encoding="utf-8")

    _run_over_samples(manifest, _discover_samples(in_dir), worker, ctx.obj["jobs"])
    manifest.write(out_dir)
    _summarize(manifest)
    ctx.exit(manifest.exit_code)


def _make_endpoint(spec, config: ToolConfig):
    if spec == "stub:empty":
        return ScriptedEndpoint(lambda messages, temperature: '{"critique": []}')
    if spec:
        base_url, _, model = spec.partition("::")
        return HttpChatEndpoint(base_url=base_url, model=model or "default")
    agent_cfg = config.agent.get("endpoint", {})
    if agent_cfg.get("base_url"):
        return HttpChatEndpoint(
            base_url=agent_cfg["base_url"],
            model=agent_cfg.get("model", "default"),
            token_env=agent_cfg.get("token_env", "FIGFORGE_API_TOKEN"),
        )
    return None


def _generate_one(json_path: Path, target: Path, mode: str, config: ToolConfig,
                  agent_endpoint=None, agent_options: dict | None = None) -> None:
    if json_path.name == "ir.json":
        ir = ir_from_json(json_path.read_text(encoding="utf-8"))
    else:
        ir = to_ir(parse_document(json_path.read_bytes()))
    target.mkdir(parents=True, exist_ok=True)
    # carry the IR along so render/evaluate can derive the viewport
    (target / "ir.json").write_text(ir_to_json(ir), encoding="utf-8")
    codegen_config = config.codegen_config(mode)

    assets_dir = json_path.parent / "assets"
    if assets_dir.is_dir():
        store = AssetStore.from_dir(json_path.parent)
        store.write_dir(target)

    if agent_endpoint is None:
        page = generate(ir, codegen_config)
    else:
        options = dict(agent_options or {})
        agent_config = AgentConfig(model_endpoint=agent_endpoint, **options)
        screenshot = target / "draft.png"
        draft = generate(ir, codegen_config)
        draft_path = target / "draft.html"
        draft_path.write_text(draft.html, encoding="utf-8")
        buffer = render_page(draft_path, (int(ir.page_size[0]) or 1, int(ir.page_size[1]) or 1),
                             renderer=config.renderer)
        buffer.to_pil().save(screenshot)
        page, trace = run_agent(ir, screenshot, agent_config, codegen_config)
        (target / "trace.json").write_text(trace.to_json(), encoding="utf-8")
    (target / "index.html").write_text(page.html, encoding="utf-8")


@main.command("generate")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.option("--mode", default="faithful", show_default=True,
              type=click.Choice(sorted(_MODE_ALIASES), case_sensitive=False))
@click.option("--agent", "use_agent", is_flag=True, help="Run the critic/refiner loop.")
@click.option("--endpoint", default=None,
              help='Model endpoint: "stub:empty" or "<base_url>::<model>".')
@click.pass_context
def cmd_generate(ctx, in_dir: Path, out_dir: Path, mode: str, use_agent: bool, endpoint):
    """Generate one HTML page per refined sample (optionally agent-refined)."""
    config: ToolConfig = ctx.obj["config"]
    agent_endpoint = None
    if use_agent:
        agent_endpoint = _make_endpoint(endpoint, config)
        if agent_endpoint is None:
            click.echo("error: --agent requires an endpoint (flag or config)", err=True)
            ctx.exit(EXIT_CONFIG)
    manifest = RunManifest(f"generate:{mode}", ctx.obj["seed"], config.digest())
    agent_options = {k: v for k, v in config.agent.items() if k != "endpoint"}

    def worker(sample):
        sample_id, json_path = sample
        _generate_one(json_path, out_dir / sample_id, _MODE_ALIASES[mode.lower()],
                      config, agent_endpoint, agent_options)

    _run_over_samples(manifest, _discover_samples(in_dir), worker, ctx.obj["jobs"])
    manifest.write(out_dir)
    _summarize(manifest)
    ctx.exit(manifest.exit_code)


@main.command("render")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.option("--renderer", default=None, help="Command template override.")
@click.option("--viewport", default=None, help="Fallback WxH when no IR is present.")
@click.pass_context
def cmd_render(ctx, in_dir: Path, out_dir: Path, renderer, viewport):
    """Screenshot generated pages at 2x their design size."""
    config: ToolConfig = ctx.obj["config"]
    renderer = renderer or config.renderer
    manifest = RunManifest("render", ctx.obj["seed"], config.digest())

    def page_size(sample_dir: Path) -> tuple[int, int]:
        ir_path = sample_dir / "ir.json"
        if ir_path.exists():
            ir = ir_from_json(ir_path.read_text(encoding="utf-8"))
            return int(ir.page_size[0]), int(ir.page_size[1])
        design = sample_dir / "design.json"
        if design.exists():
            doc = parse_document(design.read_bytes())
            box = doc.root.bounding_box
            if box:
                return int(box.width), int(box.height)
        if viewport:
            w, _, h = viewport.partition("x")
            return int(w), int(h)
        raise FigforgeError("no IR/design to derive the viewport from; pass --viewport")

    samples = [(p.parent.name if p.name == "index.html" else p.stem, p)
               for p in sorted(in_dir.rglob("*.html"))
               if p.name in ("index.html",) or p.parent == in_dir]

    def worker(sample):
        sample_id, html_path = sample
        size = page_size(html_path.parent)
        buffer = render_page(html_path, size, renderer=renderer)
        out_dir.mkdir(parents=True, exist_ok=True)
        buffer.to_pil().save(out_dir / f"{sample_id}.png")

    _run_over_samples(manifest, samples, worker, ctx.obj["jobs"])
    manifest.write(out_dir)
    _summarize(manifest)
    ctx.exit(manifest.exit_code)


def _format_percent(value: float) -> str:
    return f"{value * 100:.2f}"


@main.command("evaluate")
@click.argument("html_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("designs_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_csv", type=click.Path(path_type=Path))
@click.option("--with-ves", is_flag=True, help="Compute VES through the sidecar.")
@click.option("--render/--no-render", "do_render", default=False, show_default=True,
              help="Render pages to compute MAE against the design images.")
@click.option("--renderer", default=None, help="Command template override.")
@click.pass_context
def cmd_evaluate(ctx, html_dir: Path, designs_dir: Path, out_csv: Path,
                 with_ves: bool, do_render: bool, renderer):
    """Metric CSV over paired generated pages and design images."""
    from .metrics import evaluate  # local import keeps CLI startup light

    config: ToolConfig = ctx.obj["config"]
    renderer = renderer or config.renderer
    sidecar = None
    if with_ves:
        if not config.sidecar:
            click.echo("error: --with-ves needs a sidecar command in the config "
                       "(key: sidecar), e.g. the bundled frontend embedder", err=True)
            ctx.exit(EXIT_CONFIG)
        sidecar = SidecarClient(config.sidecar)

    manifest = RunManifest("evaluate", ctx.obj["seed"], config.digest())
    pages = [(p.parent.name if p.name == "index.html" else p.stem, p)
             for p in sorted(html_dir.rglob("*.html"))
             if p.name == "index.html" or p.parent == html_dir]

    rows: dict[str, list[str]] = {}

    reports_dir = out_csv.parent / "reports"

    def worker(sample):
        sample_id, html_path = sample
        design_png = designs_dir / f"{sample_id}.png"
        report = evaluate(html_path.read_text(encoding="utf-8"))
        reports_dir.mkdir(parents=True, exist_ok=True)
        (reports_dir / f"{sample_id}.json").write_text(
            json.dumps(report.as_dict(), indent=2), encoding="utf-8")
        ves_text = mae_text = ""
        status = "ok"
        if not design_png.exists():
            status = "missing_design"
        else:
            if do_render:
                design = ImageBuffer.load(design_png)
                shot = render_page(html_path, (design.width // 2 or 1, design.height // 2 or 1),
                                   renderer=renderer)
                mae_text = f"{mae(design, shot):.4f}"
            if sidecar is not None:
                shot_path = html_path.parent / "render.png"
                if not shot_path.exists():
                    design = ImageBuffer.load(design_png)
                    shot = render_page(html_path, (design.width // 2 or 1, design.height // 2 or 1),
                                       renderer=renderer)
                    shot.to_pil().save(shot_path)
                ves_text = f"{ves(design_png, shot_path, sidecar):.4f}"
        rows[sample_id] = [
            sample_id, ves_text, mae_text,
            _format_percent(report.rur.value), _format_percent(report.bc.value),
            _format_percent(report.fu.value), _format_percent(report.apr.value),
            _format_percent(report.str.value), _format_percent(report.isr.value),
            _format_percent(report.avu.value), _format_percent(report.ccr.value),
            status,
        ]
        if status != "ok":
            raise FigforgeError(f"no design image for {sample_id}")

    _run_over_samples(manifest, pages, worker, ctx.obj["jobs"])
    out_csv.parent.mkdir(parents=True, exist_ok=True)
    with open(out_csv, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVALUATE_COLUMNS)
        for sample_id in sorted(rows):
            writer.writerow(rows[sample_id])
    if sidecar is not None:
        sidecar.close()
    manifest.write(out_csv.parent)
    _summarize(manifest)
    ctx.exit(EXIT_PARTIAL if not pages else manifest.exit_code)


@main.command("agent")
@click.argument("in_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("out_dir", type=click.Path(path_type=Path))
@click.option("--mode", default="faithful", show_default=True,
              type=click.Choice(sorted(_MODE_ALIASES), case_sensitive=False))
@click.option("--endpoint", default=None,
              help='Model endpoint: "stub:empty" or "<base_url>::<model>".')
@click.pass_context
def cmd_agent(ctx, in_dir: Path, out_dir: Path, mode: str, endpoint):
    """Full agent pipeline per refined sample (draft, critique, refine)."""
    config: ToolConfig = ctx.obj["config"]
    agent_endpoint = _make_endpoint(endpoint, config)
    if agent_endpoint is None:
        click.echo("error: agent needs an endpoint (flag or config)", err=True)
        ctx.exit(EXIT_CONFIG)
    manifest = RunManifest("agent", ctx.obj["seed"], config.digest())
    agent_options = {k: v for k, v in config.agent.items() if k != "endpoint"}

    def worker(sample):
        sample_id, json_path = sample
        _generate_one(json_path, out_dir / sample_id, _MODE_ALIASES[mode.lower()],
                      config, agent_endpoint, agent_options)

    _run_over_samples(manifest, _discover_samples(in_dir), worker, ctx.obj["jobs"])
    manifest.write(out_dir)
    _summarize(manifest)
    ctx.exit(manifest.exit_code)


def _summarize(manifest: RunManifest) -> None:
    ok = sum(1 for s in manifest.samples if s.status == "OK")
    failed = [s for s in manifest.samples if s.status == "FAILED"]
    click.echo(f"{manifest.command}: {ok}/{len(manifest.samples)} samples ok")
    for status in failed:
        click.echo(f"  FAILED {status.sample_id}: {status.detail}", err=True)


if __name__ == "__main__":
    main()
