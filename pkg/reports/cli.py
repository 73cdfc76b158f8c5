"""Entry point of the ``errstat`` executable: ``errstat <subcommand> [options]``."""
import os
import sys

import django
from django.core.management import load_command_class

SUBCOMMANDS = ('stats', 'compare', 'sip', 'corr', 'rank', 'simulate')

USAGE = (
    "usage: errstat {%s} [options]\n"
    "Run 'errstat <subcommand> --help' for the options of a subcommand.\n" % ','.join(SUBCOMMANDS)
)


def setup():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    django.setup()


def run(argv=None):
    """Runs one subcommand and returns its exit code: 0 success, 2 invalid input, 1 internal error."""
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ('-h', '--help'):
        sys.stdout.write(USAGE)
        return 0 if argv else 2
    name = argv[0]
    if name not in SUBCOMMANDS:
        sys.stderr.write(f"errstat: unknown subcommand '{name}'\n{USAGE}")
        return 2

    setup()
    command = load_command_class('reports', name)
    try:
        command.run_from_argv(['errstat', name, *argv[1:]])
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    return 0
