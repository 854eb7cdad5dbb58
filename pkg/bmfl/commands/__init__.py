"""
CLI subcommands, one module each.
"""
from bmfl.commands import byk, curve, definetti, gibbs, ground, hartree, localize, sweep, verify
from bmfl.commands.base import Command

COMMANDS: dict[str, Command] = {
    module.command.name: module.command
    for module in (ground, sweep, hartree, curve, localize, definetti, gibbs, byk, verify)
}

__all__ = ["COMMANDS", "Command"]
