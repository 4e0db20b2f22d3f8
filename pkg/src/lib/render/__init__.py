from .svg import RenderOptions, render_gallery, render_svg, target_frame

__all__ = ["RenderOptions", "render_gallery", "render_svg", "target_frame"]
