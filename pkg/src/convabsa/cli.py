"""Command-line client for the toolkit service.

Every subcommand drives the HTTP service: by default an in-process
instance (no server needed for batch jobs), or a remote one via
``--server``.  File reading and writing happen client-side, so the
service never touches paths.

Exit codes: 0 success, 1 validation findings, 2 usage error, 3 backend
failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .metrics import FlipScoreReport, PRF, ElementScore, ScoreReport, render_flip_table, render_score_table
from .dialogue import TriggerType

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_BACKEND = 3

_DEFAULT_SAMPLE_RECORD = json.dumps(
    {
        "doc_id": "sample-0001",
        "language": "en",
        "utterances": [
            {
                "index": 0,
                "speaker_id": 0,
                "speaker_name": "Dana",
                "text": "The espresso machine's frother is excellent because it makes dense foam fast.",
                "reply": -1,
                "modality": None,
            },
            {
                "index": 1,
                "speaker_id": 1,
                "speaker_name": "Kim",
                "text": "The frother is noisy though, since the pump rattles at full power.",
                "reply": 0,
                "modality": [
                    {"type": "img", "caption": "Close-up of a stainless steel milk frother.", "id": "img-1"}
                ],
            },
        ],
        "sextuples": [
            {
                "holder": {"value": "Dana", "manner": "implicit"},
                "target": {"value": "espresso machine's frother", "manner": "implicit"},
                "aspect": {"value": "frother", "manner": "explicit", "span": {"utt": 0, "start": 3, "end": 4}},
                "opinion": {"value": "excellent", "manner": "explicit", "span": {"utt": 0, "start": 5, "end": 6}},
                "sentiment": "positive",
                "rationale": {
                    "value": "it makes dense foam fast",
                    "manner": "explicit",
                    "span": {"utt": 0, "start": 7, "end": 12},
                },
            }
        ],
        "flips": [],
    },
    ensure_ascii=False,
)


class ServiceClient:
    """HTTP access to the service, in-process unless a server is given."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server, timeout=300.0)
        else:
            from fastapi.testclient import TestClient

            from .service import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)

    def post(self, path: str, payload: dict) -> dict:
        try:
            response = self._client.post(path, json=payload)
        except httpx.HTTPError as e:
            click.echo(f"service unreachable: {e}", err=True)
            sys.exit(EXIT_BACKEND)
        if response.status_code >= 500:
            click.echo(f"backend failure: {_detail(response)}", err=True)
            sys.exit(EXIT_BACKEND)
        if response.status_code >= 400:
            click.echo(f"error: {_detail(response)}", err=True)
            sys.exit(EXIT_USAGE)
        return response.json()


def _detail(response: httpx.Response) -> str:
    try:
        detail = response.json().get("detail")
    except ValueError:
        detail = None
    if isinstance(detail, dict):
        lines = [str(detail.get("message", "request failed"))]
        for finding in detail.get("findings", []):
            lines.append(f"  {_finding_line(finding)}")
        return "\n".join(lines)
    return str(detail) if detail is not None else response.text


def _finding_line(finding: dict) -> str:
    where = ""
    if finding.get("line") is not None:
        where += f"line {finding['line']} "
    if finding.get("utterance") is not None:
        where += f"utterance {finding['utterance']} "
    return f"{where}[{finding['rule']}] {finding['severity']}: {finding['message']}"


def _machine(payload: dict) -> None:
    click.echo(json.dumps(payload, ensure_ascii=False, sort_keys=True))


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


server_option = click.option(
    "--server", envvar="CONVABSA_SERVER", default=None, metavar="URL",
    help="Remote service URL; default runs the service in-process.",
)
format_option = click.option(
    "--format", "fmt", type=click.Choice(["human", "machine"]), default="human",
    help="Output rendering.",
)


@click.group()
def main() -> None:
    """Corpus validation, scoring, flip analysis, and pipeline runs."""


@main.command()
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@server_option
@format_option
def validate(corpus: str, server: str | None, fmt: str) -> None:
    """Check a corpus file; nonzero exit when findings exist."""
    body = ServiceClient(server).post("/corpus/validate", {"records": _read_text(corpus)})
    if fmt == "machine":
        _machine(body)
    else:
        for finding in body["findings"]:
            click.echo(_finding_line(finding))
        click.echo(f"dialogues: {body['dialogues']}")
        click.echo("valid" if body["ok"] else "invalid")
    if not body["ok"]:
        sys.exit(EXIT_FINDINGS)


@main.command()
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@server_option
@format_option
def stats(corpus: str, server: str | None, fmt: str) -> None:
    """Corpus-level counts."""
    body = ServiceClient(server).post("/corpus/stats", {"records": _read_text(corpus)})
    if fmt == "machine":
        _machine(body)
        return
    click.echo(f"dialogues: {body['dialogue_count']}")
    click.echo(f"utterances: {body['utterance_count']}")
    click.echo(f"speakers: {body['speaker_count']}")
    click.echo(f"sextuples: {body['sextuple_count']}")
    click.echo(f"flips: {body['flip_count']}")
    for kind, count in sorted(body["modality_counts"].items()):
        click.echo(f"attachments[{kind}]: {count}")
    for manner, count in sorted(body["manner_counts"].items()):
        click.echo(f"elements[{manner}]: {count}")
    for finding in body["findings"]:
        click.echo(_finding_line(finding))


def _parse_ratios(value: str) -> tuple[float, float, float]:
    parts = value.split(",")
    if len(parts) != 3:
        raise click.BadParameter("expected three comma-separated proportions")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


@main.command()
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--ratios", default="0.8,0.1,0.1", show_default=True, help="train,dev,test proportions")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--out-dir", type=click.Path(file_okay=False), default=None,
    help="Directory for the three output files; defaults to the corpus directory.",
)
@server_option
@format_option
def split(corpus: str, ratios: str, seed: int, out_dir: str | None, server: str | None, fmt: str) -> None:
    """Deterministic stratified train/dev/test split."""
    proportions = _parse_ratios(ratios)
    body = ServiceClient(server).post(
        "/corpus/split", {"records": _read_text(corpus), "ratios": proportions, "seed": seed}
    )
    stem = Path(corpus).stem
    directory = Path(out_dir) if out_dir else Path(corpus).parent
    directory.mkdir(parents=True, exist_ok=True)
    paths = {}
    for part in ("train", "dev", "test"):
        path = directory / f"{stem}.{part}.jsonl"
        path.write_text(body[part], encoding="utf-8")
        paths[part] = str(path)
    if fmt == "machine":
        _machine({"paths": paths, "sizes": body["sizes"]})
    else:
        for part, size in zip(("train", "dev", "test"), body["sizes"]):
            click.echo(f"{part}: {paths[part]} ({size} dialogues)")


@main.command()
@click.option("--pred", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--gold", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--judge", type=click.Choice(["offline", "remote"]), default="offline", show_default=True)
@click.option(
    "--judge-backend", type=click.Path(exists=True, dir_okay=False), default=None,
    help="Backend config file for the remote semantic judge.",
)
@server_option
@format_option
def score(pred: str, gold: str, judge: str, judge_backend: str | None, server: str | None, fmt: str) -> None:
    """Score a prediction corpus against gold annotations."""
    payload: dict = {"pred": _read_text(pred), "gold": _read_text(gold), "judge": judge}
    if judge == "remote":
        if judge_backend is None:
            raise click.UsageError("--judge remote requires --judge-backend")
        payload["judge_backend"] = json.loads(_read_text(judge_backend))
    body = ServiceClient(server).post("/score", payload)
    if fmt == "machine":
        _machine(body)
        return
    click.echo(render_score_table(_report_from_dict(body["report"])))
    click.echo(render_flip_table(_flip_report_from_dict(body["flip_report"])))


def _prf(obj: dict) -> PRF:
    return PRF(obj["precision"], obj["recall"], obj["f1"])


def _report_from_dict(obj: dict) -> ScoreReport:
    return ScoreReport(
        elements={
            c: ElementScore(_prf(s["exact"]), _prf(s["relevant"]), _prf(s["combined"]), _prf(s["pooled"]))
            for c, s in obj["elements"].items()
        },
        sentiment_macro_f1=obj["sentiment_macro_f1"],
        pairs={k: _prf(v) for k, v in obj["pairs"].items()},
        sextuple_micro=_prf(obj["sextuple_micro"]),
        sextuple_identification=_prf(obj["sextuple_identification"]),
    )


def _flip_report_from_dict(obj: dict) -> FlipScoreReport:
    return FlipScoreReport(
        flip=_prf(obj["flip"]),
        trigger_macro_f1=obj["trigger_macro_f1"],
        per_trigger_f1={TriggerType(k): v for k, v in obj["per_trigger_f1"].items()},
        flip_trig=_prf(obj["flip_trig"]),
    )


@main.command(name="derive-flips")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@server_option
@format_option
def derive_flips_cmd(corpus: str, server: str | None, fmt: str) -> None:
    """Derive sentiment flips and audit them against the annotations."""
    body = ServiceClient(server).post("/flips/derive", {"records": _read_text(corpus)})
    if fmt == "machine":
        _machine(body)
    else:
        for entry in body["dialogues"]:
            click.echo(f"{entry['doc_id']}:")
            for flip in entry["derived"]:
                click.echo(
                    f"  ({flip['holder']}, {flip['target']}, {flip['aspect']}, "
                    f"{flip['initial']} -> {flip['flipped']})"
                )
            for finding in entry["findings"]:
                click.echo(f"  {_finding_line(finding)}")
    if not body["consistent"]:
        sys.exit(EXIT_FINDINGS)


@main.command(name="run-pipeline")
@click.argument("corpus", type=click.Path(exists=True, dir_okay=False))
@click.option("--backend", "backend_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--judge-backend", "judge_backend_path", type=click.Path(exists=True, dir_okay=False), default=None,
    help="Separate backend config for verification verdicts.",
)
@click.option("--no-verify", is_flag=True, default=False, help="Disable claim verification.")
@click.option("--max-retries", type=int, default=3, show_default=True)
@click.option("--parallel", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write per-dialogue result documents here.")
@server_option
@format_option
def run_pipeline(
    corpus: str,
    backend_path: str,
    judge_backend_path: str | None,
    no_verify: bool,
    max_retries: int,
    parallel: int,
    out: str | None,
    server: str | None,
    fmt: str,
) -> None:
    """Extract sextuples and flips from every dialogue in a corpus."""
    payload = {
        "records": _read_text(corpus),
        "backend": json.loads(_read_text(backend_path)),
        "verify": not no_verify,
        "max_retries": max_retries,
        "parallel": parallel,
    }
    if judge_backend_path:
        payload["judge_backend"] = json.loads(_read_text(judge_backend_path))
    body = ServiceClient(server).post("/pipeline/run", payload)
    documents = "\n".join(
        json.dumps(result, ensure_ascii=False, sort_keys=True) for result in body["results"]
    )
    if out:
        Path(out).write_text(documents + ("\n" if documents else ""), encoding="utf-8")
    if fmt == "machine":
        if not out:
            click.echo(documents)
    else:
        for result in body["results"]:
            line = (
                f"{result['doc_id']}: {len(result['sextuples'])} sextuples, "
                f"{len(result['flips'])} flips"
            )
            if result["error"]:
                line += f" FAILED: {result['error']}"
            click.echo(line)
    if any(result["error"] for result in body["results"]):
        sys.exit(EXIT_BACKEND)


@main.command(name="synth-prompt")
@click.option("--theme", required=True)
@click.option("--speakers", type=int, required=True)
@click.option("--turns", type=int, required=True)
@click.option(
    "--modalities", default="", help="Comma-separated kinds among image,audio,video."
)
@click.option(
    "--sample", type=click.Path(exists=True, dir_okay=False), default=None,
    help="Sample record file embedded in the prompt; a built-in record by default.",
)
@server_option
@format_option
def synth_prompt(
    theme: str, speakers: int, turns: int, modalities: str, sample: str | None,
    server: str | None, fmt: str,
) -> None:
    """Build the dialogue-generation prompt."""
    plan = [m.strip() for m in modalities.split(",") if m.strip()]
    sample_record = _read_text(sample).strip() if sample else _DEFAULT_SAMPLE_RECORD
    body = ServiceClient(server).post(
        "/synthesis/prompt",
        {
            "theme": theme,
            "speakers": speakers,
            "turns": turns,
            "modality_plan": plan,
            "sample_record": sample_record,
        },
    )
    if fmt == "machine":
        _machine(body)
    else:
        click.echo(body["prompt"])


@main.command()
@click.option("--query", required=True, help="Query caption.")
@click.option("--pool", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("-k", type=int, default=10, show_default=True)
@server_option
@format_option
def retrieve(query: str, pool: str, k: int, server: str | None, fmt: str) -> None:
    """Rank a candidate pool file against a query caption."""
    from .synthesis import load_candidate_pool

    try:
        candidates = load_candidate_pool(_read_text(pool))
    except ValueError as e:
        raise click.UsageError(str(e)) from e
    body = ServiceClient(server).post(
        "/retrieval/rank",
        {
            "query": query,
            "candidates": [{"id": cid, "caption": caption} for cid, caption, _ in candidates],
            "k": k,
        },
    )
    if fmt == "machine":
        _machine(body)
    else:
        for cid in body["ranked"]:
            click.echo(cid)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
