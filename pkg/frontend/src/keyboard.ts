/** Keyboard shortcuts for the review queue. */

export type KeyboardActions = {
  onInclude: () => void;
  onExclude: () => void;
  onMoveUp: () => void;
  onMoveDown: () => void;
  onExport: () => void;
};

export function bindKeyboard(target: Document, actions: KeyboardActions): () => void {
  const handler = (event: KeyboardEvent) => {
    const element = event.target as HTMLElement | null;
    if (element && (element.tagName === "INPUT" || element.tagName === "TEXTAREA" || element.isContentEditable)) {
      return;
    }
    switch (event.key) {
      case "i":
      case "Enter":
        event.preventDefault();
        actions.onInclude();
        break;
      case "e":
      case "Backspace":
        event.preventDefault();
        actions.onExclude();
        break;
      case "ArrowUp":
      case "k":
        event.preventDefault();
        actions.onMoveUp();
        break;
      case "ArrowDown":
      case "j":
        event.preventDefault();
        actions.onMoveDown();
        break;
      case "x":
        event.preventDefault();
        actions.onExport();
        break;
    }
  };
  target.addEventListener("keydown", handler);
  return () => target.removeEventListener("keydown", handler);
}
