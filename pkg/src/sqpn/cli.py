"""Command-line client for the sqpn service.

All computation happens behind the HTTP API: by default the CLI drives the
service in-process, and with --server (or SQPN_SERVER) it talks to a
running instance instead.  Exit codes: 0 success, 1 domain or input error,
2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

import httpx

from .algebra import Interval, Sign, format_number
from .report import render_result_table


def make_client(server: Optional[str]) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _fail(response: httpx.Response) -> int:
    try:
        payload = response.json()
    except ValueError:
        print(f"error: {response.status_code}", file=sys.stderr)
        return 1
    detail = payload.get("detail", "request failed")
    print(f"error: {detail}", file=sys.stderr)
    for diag in payload.get("diagnostics", []):
        print(f"  {diag['line']}:{diag['col']}: {diag['message']}", file=sys.stderr)
    return 1


def _read_network(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise SystemExit(f"error: cannot read {path}: {exc}")


def _parse_assignment(text: str) -> tuple[str, bool]:
    name, sep, value = text.partition("=")
    if not sep or value not in ("true", "false"):
        raise SystemExit(2)
    return name, value == "true"


def _parse_evidence(text: Optional[str]) -> dict[str, bool]:
    if not text:
        return {}
    return dict(_parse_assignment(chunk) for chunk in text.split(","))


def _parse_strength(text: str) -> dict:
    try:
        lo_text, hi_text = text.split(",")
        return {"lo": float(lo_text), "hi": float(hi_text)}
    except ValueError:
        raise SystemExit(2)


def cmd_validate(client: httpx.Client, args) -> int:
    response = client.post(
        "/validate", json={"network": _read_network(args.file), "lenient": args.lenient}
    )
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    for warning in payload["warnings"]:
        print(f"warning: {warning['line']}:{warning['col']}: {warning['message']}", file=sys.stderr)
    if payload["valid"]:
        print("ok")
        return 0
    for violation in payload["violations"]:
        print(f"{violation['code']} [{violation['subject']}]: {violation['message']}", file=sys.stderr)
    return 1


def cmd_abstract(client: httpx.Client, args) -> int:
    response = client.post(
        "/abstract", json={"network": _read_network(args.file), "lenient": args.lenient}
    )
    if response.status_code != 200:
        return _fail(response)
    print("arc\tsign")
    for row in response.json()["influences"]:
        print(f"{row['parent']} -> {row['child']}\t{row['sign']}")
    return 0


def cmd_intervals(client: httpx.Client, args) -> int:
    response = client.post(
        "/intervals", json={"network": _read_network(args.file), "lenient": args.lenient}
    )
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    print("influence\tinterval\tdirection\torigin")
    for row in payload["influences"]:
        interval = Interval(row["lo"], row["hi"])
        print(f"{row['source']} -> {row['target']}\t{interval}\t{row['direction']}\t{row['origin']}")
    if payload["intercausal"]:
        print("intercausal\tinterval\tobserved")
        for row in payload["intercausal"]:
            interval = Interval(row["lo"], row["hi"])
            a, b = row["parents"]
            value = "true" if row["observed_value"] else "false"
            print(f"{a} <-> {b}\t{interval}\t{row['child']}={value}")
    return 0


def cmd_propagate(client: httpx.Client, args) -> int:
    node, value = _parse_assignment(args.observe)
    request = {
        "network": _read_network(args.file),
        "lenient": args.lenient,
        "observe": {"node": node, "value": value},
        "algorithm": args.algorithm,
        "mode": args.mode,
        "evidence": _parse_evidence(args.evidence),
        "m": args.m,
    }
    if args.strength:
        request["strength"] = _parse_strength(args.strength)
    response = client.post("/propagate", json=request)
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    if payload["algorithm"] == "signs":
        per_node = {n: Sign(v["sign"]) for n, v in payload["per_node"].items()}
    else:
        per_node = {n: Interval(v["lo"], v["hi"]) for n, v in payload["per_node"].items()}
    sys.stdout.write(render_result_table(per_node, payload["algorithm"]))
    if payload["collapsed"]:
        print(f"collapsed: {', '.join(payload['collapsed'])}", file=sys.stderr)
    return 0


def cmd_resolve(client: httpx.Client, args) -> int:
    response = client.post("/resolve", json={
        "network": _read_network(args.file),
        "lenient": args.lenient,
        "source": args.source,
        "target": args.target,
        "sign_abstraction": args.sign_abstraction,
    })
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    interval = Interval(payload["lo"], payload["hi"])
    print(f"net influence\t{interval}")
    print(f"removed\t{', '.join(payload['removed']) or '-'}")
    print(f"resolved\t{'yes' if payload['resolved'] else 'no'}")
    return 0


def cmd_oracle(client: httpx.Client, args) -> int:
    response = client.post("/oracle", json={
        "network": _read_network(args.file),
        "lenient": args.lenient,
        "target": args.target,
        "evidence": _parse_evidence(args.evidence),
    })
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    print(f"Pr({payload['target']}=true | evidence) = {format_number(payload['probability'])}")
    return 0


def cmd_audit(client: httpx.Client, args) -> int:
    seed = args.seed
    if os.environ.get("SQPN_SEED"):
        seed = int(os.environ["SQPN_SEED"])
    response = client.post("/audit", json={
        "network": _read_network(args.file),
        "lenient": args.lenient,
        "trials": args.trials,
        "seed": seed,
    })
    if response.status_code != 200:
        return _fail(response)
    payload = response.json()
    print("trial\tobservation\ttarget\tdelta\tlo\thi\tcontained")
    for row in payload["rows"]:
        value = "true" if row["value"] else "false"
        print(
            f"{row['trial']}\t{row['observed']}={value}\t{row['target']}\t"
            f"{format_number(row['delta'])}\t{format_number(row['lo'])}\t"
            f"{format_number(row['hi'])}\t{'yes' if row['contained'] else 'no'}"
        )
    print(f"containment\t{format_number(payload['containment_rate'])}", file=sys.stderr)
    return 0


def cmd_serve(_client, args) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqpn",
        description="Semi-qualitative probabilistic networks: validation, abstraction, propagation",
    )
    parser.add_argument("--server", default=os.environ.get("SQPN_SERVER"),
                        help="URL of a running sqpn service (default: run in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_file(p):
        p.add_argument("file", help=".sqpn network file")
        p.add_argument("--lenient", action="store_true",
                       help="ignore signs on quantified nodes with a warning")
        return p

    with_file(sub.add_parser("validate", help="check a network file")).set_defaults(run=cmd_validate)
    with_file(sub.add_parser("abstract", help="abstract cpts into arc signs")).set_defaults(run=cmd_abstract)
    with_file(sub.add_parser("intervals", help="print the interval network")).set_defaults(run=cmd_intervals)

    p = with_file(sub.add_parser("propagate", help="propagate one observation"))
    p.add_argument("--observe", required=True, metavar="NODE=true|false")
    p.add_argument("--algorithm", choices=("signs", "intervals"), default="intervals")
    p.add_argument("--mode", choices=("exact", "maximal", "ignorant"), default="maximal",
                   help="entry interval mode (interval propagation)")
    p.add_argument("--strength", metavar="LO,HI",
                   help="multiply a maximal-effect result by this interval")
    p.add_argument("--m", type=int, default=None, help="per-node interval change limit")
    p.add_argument("--evidence", metavar="N=true,M=false", help="prior evidence")
    p.set_defaults(run=cmd_propagate)

    p = with_file(sub.add_parser("resolve", help="resolve a trade-off by marginalization"))
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--sign-abstraction", action="store_true",
                   help="return the unit interval of the net sign instead of the interval")
    p.set_defaults(run=cmd_resolve)

    p = with_file(sub.add_parser("oracle", help="exact posterior by joint enumeration"))
    p.add_argument("--target", required=True)
    p.add_argument("--evidence", metavar="N=true,M=false")
    p.set_defaults(run=cmd_oracle)

    p = with_file(sub.add_parser("audit", help="soundness audit against the oracle"))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="overridden by SQPN_SEED")
    p.set_defaults(run=cmd_audit)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(run=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(None, args)
    try:
        with make_client(args.server) as client:
            return args.run(client, args)
    except httpx.HTTPError as exc:
        print(f"error: cannot reach the service: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
