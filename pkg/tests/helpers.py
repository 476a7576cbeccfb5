import io
import json
from pathlib import Path

from reeb_steady import cli

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name: str) -> str:
    return str(FIXTURES / name)


def run_cli(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def run_cli_json(*argv: str) -> tuple[int, object]:
    code, out, _ = run_cli(*argv)
    return code, (json.loads(out) if out.strip() else None)

ACCEPTANCE_LINES: list[str] = []


def report(criterion: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {criterion:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
