"""One PASS/FAIL line per acceptance criterion, shown in the pytest summary."""

LINES: list[str] = []


def report(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    LINES.append(line)
    print(line)
    return ok
