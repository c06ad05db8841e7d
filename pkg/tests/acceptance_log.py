"""One PASS/FAIL line per acceptance criterion, collected for the terminal summary."""

RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  [{detail}]"
    RESULTS.append(line)
    print(line)
    return ok
