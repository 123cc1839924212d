"""
    bertini_sieve.management
    ~~~~~~~~~~~~~~~~~~~~~~~~

    The ``bertini-sieve`` entry point. Subcommands are Django management
    commands; no Django project is needed to run them.
"""
import os
import sys

import django
from django.conf import ENVIRONMENT_VARIABLE, settings
from django.core.management import find_commands, load_command_class

from .. import __version__


def configure():
    """Minimal settings when the caller has not configured Django."""
    if not settings.configured and not os.environ.get(ENVIRONMENT_VARIABLE):
        settings.configure()
    django.setup()


def available_commands():
    return sorted(name.replace('_', '-') for name in find_commands(os.path.dirname(__file__)))


def usage(prog):
    lines = [f'usage: {prog} <command> [options]', '', 'Commands:']
    lines.extend(f'    {name}' for name in available_commands())
    lines.append('')
    lines.append(f"Run '{prog} <command> --help' for the options of a command.")
    return '\n'.join(lines)


def execute_from_command_line(argv=None):
    argv = list(argv or sys.argv)
    prog = os.path.basename(argv[0]) or 'bertini-sieve'
    if len(argv) < 2 or argv[1] in ('-h', '--help', 'help'):
        sys.stdout.write(usage(prog) + '\n')
        return
    if argv[1] == '--version':
        sys.stdout.write(__version__ + '\n')
        return
    name = argv[1]
    if name not in available_commands():
        sys.stderr.write(f"Unknown command: '{name}'\n{usage(prog)}\n")
        sys.exit(2)
    configure()
    command = load_command_class('bertini_sieve', name.replace('-', '_'))
    command.run_from_argv([prog, name] + argv[2:])
