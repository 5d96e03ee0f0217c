// Navigation discipline: screens push and pop, only the top is
// visible, and the root never pops.

export class ScreenStack {
  private frames: string[] = [];

  boot(entry: string): void {
    this.frames = [entry];
  }

  push(screen: string): void {
    this.frames.push(screen);
  }

  // Pop on the root is a no-op; returns whether anything moved.
  pop(): boolean {
    if (this.frames.length <= 1) return false;
    this.frames.pop();
    return true;
  }

  top(): string {
    if (this.frames.length === 0) throw new Error('screen stack used before boot');
    return this.frames[this.frames.length - 1];
  }

  depth(): number {
    return this.frames.length;
  }

  snapshot(): string[] {
    return this.frames.slice();
  }
}
