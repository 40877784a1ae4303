import functools

# criterion label -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def criterion(label):
    """Record a PASS/FAIL line for ``label``; the test returns its detail string."""
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as e:
                ACCEPTANCE[label] = (False, f"{type(e).__name__}: {str(e).splitlines()[0] if str(e) else ''}")
                raise
            ACCEPTANCE[label] = (True, detail or "")
        return run
    return wrap


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        ok, detail = ACCEPTANCE[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
