import logging
import inspect
from functools import wraps

logger = logging.getLogger("command_registry")


class CommandRegistry:
    """
    Registry of CLI subcommands and the coroutines that run them
    """
    def __init__(self):
        self.commands = {}

    def register(self, command_name, description=None, help_text=None, experiment_kind=None):
        """
        Decorator for registering subcommands

        Args:
            command_name (str): Subcommand name as typed on the command line
            description (str, optional): One-line description
            help_text (str, optional): Longer help text
            experiment_kind (str, optional): SweepConfig experiment_kind this subcommand runs

        Returns:
            function: Decorator function
        """
        def decorator(func):
            cmd_description = description
            cmd_help = help_text

            # Extract description from function docstring if not provided
            if not cmd_description and func.__doc__:
                doc_lines = inspect.getdoc(func).split('\n')
                cmd_description = doc_lines[0].strip() if doc_lines else None
                if len(doc_lines) > 1:
                    cmd_help = '\n'.join(doc_lines[1:]).strip()

            self.commands[command_name] = {
                'name': command_name,
                'handler': func,
                'description': cmd_description or f"Run the {command_name} subcommand",
                'help': cmd_help or cmd_description or "",
                'experiment_kind': experiment_kind,
            }
            logger.debug(f"Registered command: {command_name}")

            @wraps(func)
            async def wrapper(*args, **kwargs):
                return await func(*args, **kwargs)

            return wrapper

        return decorator

    def get_command(self, command_name):
        """
        Get the info for the specified command

        Returns:
            dict or None: Command info, or None if not found
        """
        return self.commands.get(command_name)

    def add_subparsers(self, parser, add_common_arguments):
        """
        Create one argparse subparser per registered command

        Args:
            parser (argparse.ArgumentParser): Top-level parser
            add_common_arguments (callable): Adds the shared flags to a subparser
        """
        subparsers = parser.add_subparsers(dest='command', metavar='command')
        subparsers.required = True
        for cmd_name, cmd_info in sorted(self.commands.items()):
            sub = subparsers.add_parser(cmd_name, help=cmd_info['description'],
                                        description=cmd_info['help'] or cmd_info['description'])
            add_common_arguments(sub)
        return subparsers

    def get_help_text(self, command_name=None):
        """
        Get help text for one command or a listing of all of them
        """
        if command_name:
            cmd_info = self.get_command(command_name)
            if cmd_info:
                return f"{cmd_info['name']} - {cmd_info['description']}\n\n{cmd_info['help']}"
            return f"Command {command_name} not found."

        help_text = "Available commands:\n\n"
        for cmd_name, cmd_info in sorted(self.commands.items()):
            help_text += f"{cmd_name} - {cmd_info['description']}\n"
        return help_text


# Global command registry instance
command_registry = CommandRegistry()
