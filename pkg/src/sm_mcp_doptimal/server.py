"""MCP server exposing the design solvers."""

import asyncio
import json
import logging
from typing import Any

from mcp.server import Server
from mcp.server.stdio import stdio_server
from mcp.types import TextContent

from .config import setup_logging
from .tools import (
    ALL_TOOLS,
    APPLICATION_TOOLS,
    CHECK_TOOLS,
    DESIGN_TOOLS,
    handle_application_tool,
    handle_check_tool,
    handle_design_tool,
)

logger = logging.getLogger(__name__)

DESIGN_TOOL_NAMES = {t.name for t in DESIGN_TOOLS}
APPLICATION_TOOL_NAMES = {t.name for t in APPLICATION_TOOLS}
CHECK_TOOL_NAMES = {t.name for t in CHECK_TOOLS}


class DesignMCPServer:
    """MCP server for D-optimal, robust and maximin designs."""

    def __init__(self):
        """Initialize the server and register its handlers."""
        self.server = Server("doptimal-mcp")
        self._register_handlers()

    def _register_handlers(self) -> None:
        """Register MCP server handlers."""

        @self.server.list_tools()
        async def list_tools():
            """List all available design tools."""
            return ALL_TOOLS

        @self.server.call_tool()
        async def call_tool(name: str, arguments: dict[str, Any]) -> list[TextContent]:
            """Handle tool calls."""
            return await self.call(name, arguments)

    async def call(self, name: str, arguments: dict[str, Any] | None) -> list[TextContent]:
        """Run a tool and wrap its result as JSON text content."""
        logger.info(f"Tool call: {name} with arguments: {arguments}")
        try:
            result = await self._handle_tool(name, arguments or {})
        except Exception as e:
            logger.exception(f"Error handling tool {name}")
            result = {"error": type(e).__name__, "message": str(e)}
        return [TextContent(type="text", text=json.dumps(result, indent=2))]

    async def _handle_tool(self, name: str, arguments: dict[str, Any]) -> dict[str, Any]:
        """Route tool calls to appropriate handlers.

        Args:
            name: Tool name
            arguments: Tool arguments

        Returns:
            Tool result
        """
        if name in DESIGN_TOOL_NAMES:
            return await handle_design_tool(name, arguments)

        if name in APPLICATION_TOOL_NAMES:
            return await handle_application_tool(name, arguments)

        if name in CHECK_TOOL_NAMES:
            return await handle_check_tool(name, arguments)

        return {"error": f"Unknown tool: {name}"}

    async def run(self) -> None:
        """Run the MCP server."""
        logger.info("Starting design MCP server")

        async with stdio_server() as (read_stream, write_stream):
            await self.server.run(
                read_stream,
                write_stream,
                self.server.create_initialization_options(),
            )


def main() -> None:
    """Server-only entry point."""
    setup_logging()
    server = DesignMCPServer()
    asyncio.run(server.run())


if __name__ == "__main__":
    main()
